// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
//
// Every tolerance is pinned here. The target values come from structural
// identities of the flow (topological energy bound, gauge identities,
// modulation normalization), so each criterion is traceable to a property the
// continuum objects satisfy exactly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "smap/config.hpp"
#include "smap/direct.hpp"
#include "smap/evolution.hpp"

using namespace smap;

namespace {

int g_failures = 0;

void report(int idx, bool pass, const std::string& what, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double wrap(double a) {
  while (a > M_PI) a -= 2 * M_PI;
  while (a < -M_PI) a += 2 * M_PI;
  return a;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------- criterion 1
void criterion_energy() {
  Timer tm;
  auto g = default_grid();
  double worst = 0;
  for (int m : {1, 2, 3})
    for (double s : {0.5, 1.0, 2.0})
      for (double a : {0.0, 1.0, M_PI}) {
        auto u = harmonic_map(m, {s, a}, g);
        worst = std::max(worst, std::abs(energy(u) - 4 * M_PI * m) / (4 * M_PI * m));
      }
  double sec = tm.seconds();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "max rel err %.3e, %.2f s", worst, sec);
  report(1, worst <= 1e-6 && sec < 1.0, "harmonic family energy = 4 pi m", buf);
}

// ---------------------------------------------------------------- criterion 2
void criterion_gauge_vanishing() {
  auto g = default_grid();
  double worst_q = 0, worst_e = 0, worst_nu = 0, worst_sec = 0;
  for (int m : {1, 2, 3}) {
    // ||q(Q_{s,a})|| and the gauge-invariant |nu| for rotated/scaled members
    for (auto [s, a] : {std::pair{1.0, 0.0}, std::pair{2.0, 1.0}, std::pair{0.5, -0.7}}) {
      Timer tm;
      auto u = harmonic_map(m, {s, a}, g);
      auto fr = build_frame(u);
      auto gd = gauge_data(u, fr);
      worst_q = std::max(worst_q, l2e_norm(gd.q));
      for (std::size_t i = 0; i < g->size(); ++i)
        worst_nu = std::max(worst_nu,
                            std::abs(std::abs(gd.nu.v[i]) - h1_of(g->r()[i] / s, m)));
      worst_sec = std::max(worst_sec, tm.seconds());
    }
    // frame and signed nu against the closed forms at alpha = 0, where the
    // outer normalization (tangent projection of x-hat) is exact on the grid
    for (double s : {0.5, 1.0, 2.0}) {
      Timer tm;
      auto u = harmonic_map(m, {s, 0.0}, g);
      auto fr = build_frame(u);
      auto gd = gauge_data(u, fr);
      for (std::size_t i = 0; i < g->size(); ++i) {
        double rr = g->r()[i] / s;
        Vec3 expect{h3_of(rr, m), 0.0, -h1_of(rr, m)};
        worst_e = std::max(worst_e, (fr.e_hat.v[i] - expect).norm());
        worst_nu = std::max(worst_nu, std::abs(gd.nu.v[i] + Complex{h1_of(rr, m), 0.0}));
      }
      worst_sec = std::max(worst_sec, tm.seconds());
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf), "||q|| %.2e, frame sup %.2e, nu sup %.2e, %.2f s/case",
                worst_q, worst_e, worst_nu, worst_sec);
  report(2, worst_q <= 1e-8 && worst_e <= 1e-8 && worst_nu <= 1e-8 && worst_sec < 1.0,
         "gauge field vanishes on the harmonic family", buf);
}

// ------------------------------------------------------- criteria 3 and 4
void criterion_energy_identity_and_nonlocal() {
  auto g = default_grid();
  double worst3 = 0, worst4 = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto u = random_perturbed(1, 0.1, seed, g);
    auto gd = gauge_data(u, build_frame(u));
    double e = energy(u);
    double qn = l2e_norm(gd.q);
    worst3 = std::max(worst3, std::abs(M_PI * qn * qn + 4 * M_PI - e) / e);

    RealField v3(g);
    for (std::size_t i = 0; i < g->size(); ++i) v3.v[i] = u.v.v[i].z;
    double rel = 0;
    nonlocal_n(gd.q, gd.nu, v3, 1, 1e-3, &rel);
    worst4 = std::max(worst4, rel);
  }
  char buf3[120], buf4[120];
  std::snprintf(buf3, sizeof(buf3), "max rel defect %.3e over 50 maps", worst3);
  std::snprintf(buf4, sizeof(buf4), "max rel gap %.3e over 50 maps", worst4);
  report(3, worst3 <= 1e-6, "pi ||q||^2 + 4 pi m = energy through the gauge", buf3);
  report(4, worst4 <= 1e-6, "nonlocal potential dual forms agree", buf4);
}

// ---------------------------------------------------------------- criterion 5
void criterion_modulation_solver() {
  auto g = default_grid();
  int m = 1;
  auto q = harmonic_map(m, {1.0, 0.0}, g);
  auto f0 = f_map(q, {1.0, 0.0});
  double f_at_root = std::max(std::abs(f0.f1), std::abs(f0.f2));

  // finite-difference Jacobian against ||h1||^2 [[0,-1],[m,0]]
  double jac_err = 0;
  for (int mm : {1, 2}) {
    auto qq = harmonic_map(mm, {1.0, 0.0}, g);
    const double hn2 = h1_norm2_h1e(mm);
    const double es = 1e-6, ea = 1e-6;
    auto fb = f_map(qq, {1.0, 0.0});
    auto fs = f_map(qq, {1.0 + es, 0.0});
    auto fa = f_map(qq, {1.0, ea});
    double j11 = (fs.f1 - fb.f1) / es, j12 = (fa.f1 - fb.f1) / ea;
    double j21 = (fs.f2 - fb.f2) / es, j22 = (fa.f2 - fb.f2) / ea;
    jac_err = std::max({jac_err, std::abs(j11) / hn2, std::abs(j12 + hn2) / hn2,
                        std::abs(j21 - mm * hn2) / (mm * hn2), std::abs(j22) / hn2});
  }

  // covariance sweep
  auto up = random_perturbed(m, 0.08, 101, g);
  auto base = solve_scaling_pair(up, {1.0, 0.0});
  double cov_err = 0;
  for (double lam : {0.7, 1.6})
    for (double beta : {-0.8, 0.4}) {
      EquivariantMap u2 = up;
      u2.v = rotate_profile(resample_profile(up.v, 1.0 / lam, m), beta);
      normalize_profile(u2);
      auto st = solve_scaling_pair(u2, {lam * base.s, base.alpha + beta});
      cov_err = std::max(cov_err, std::abs(st.s - lam * base.s) +
                                      std::abs(wrap(st.alpha - base.alpha - beta)));
    }

  char buf[200];
  std::snprintf(buf, sizeof(buf), "|F(Q,1,0)| %.2e, jacobian rel %.2e, covariance %.2e",
                f_at_root, jac_err, cov_err);
  report(5, f_at_root <= 1e-12 && jac_err <= 1e-4 && cov_err <= 1e-8,
         "modulation solver: root, jacobian, covariance", buf);
}

// ---------------------------------------------------------------- criterion 6
void criterion_round_trips() {
  Timer tm;
  auto g = default_grid();
  int m = 1;

  // A: map -> (q, s, alpha) -> map
  auto u0 = perturbed_harmonic(m, 0.05, {}, g);
  auto gd = gauge_data(u0, build_frame(u0));
  auto pair = solve_scaling_pair(u0);
  ReconstructStats stA;
  auto uA = reconstruct({gd.q, pair.s, pair.alpha, m}, &stA);
  double distA = dist_h1(uA, u0);

  // B: (q, s, alpha) -> map -> (q, s, alpha)
  ComplexField q0(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double t = (g->x()[i] - 0.2) / 0.6;
    q0.v[i] = std::polar(std::exp(-0.5 * t * t), 0.7);
  }
  double n0 = l2e_norm(q0);
  for (auto& c : q0.v) c *= 0.05 / n0;
  double worstB = 0, contraction = std::max(stA.contraction_max, 0.0);
  for (auto [s, a] : {std::pair{1.0, 0.0}, std::pair{1.3, 0.5}}) {
    ReconstructStats stB;
    auto u = reconstruct({q0, s, a, m}, &stB);
    contraction = std::max(contraction, stB.contraction_max);
    auto gb = gauge_data(u, build_frame(u));
    double acc = 0;
    for (std::size_t i = 0; i < g->size(); ++i)
      acc += g->weights()[i] * std::norm(gb.q.v[i] - q0.v[i]);
    worstB = std::max(worstB, std::sqrt(acc) / 0.05);
  }
  double sec = tm.seconds();
  char buf[200];
  std::snprintf(buf, sizeof(buf), "A dist %.2e, B rel %.2e, contraction %.2f, %.1f s total",
                distA, worstB, contraction, sec);
  report(6, distA <= 1e-4 && worstB <= 1e-4 && contraction < 1.0 && sec < 30.0,
         "reconstruction round trips", buf);
}

// --------------------------------------------------------------- criterion 7
// (shared direct run for 7b & 8, returned for reuse)
struct DirectRun {
  DirectEvolveResult res;
  GridPtr grid;
  EquivariantMap initial_log;  // matched initial data on the log grid
};

void criterion_direct_solver(DirectRun& shared) {
  auto glog = default_grid();

  // 7a: Q stationary over [0, 0.1]
  Timer tm_a;
  auto gd = build_direct_grid();
  EquivariantMap q0;
  q0.m = 1;
  q0.v = Vec3Field(gd);
  for (std::size_t i = 0; i < gd->size(); ++i)
    q0.v.v[i] = Vec3{h1_of(gd->r()[i], 1), 0.0, h3_of(gd->r()[i], 1)};
  DirectEvolveConfig dc;
  dc.t_end = 0.1;
  dc.extract_gauge = false;
  dc.record_every = 1 << 30;  // endpoints only
  auto run = evolve_direct(q0, dc);
  EquivariantMap q0l = resample_map_to_grid(q0, glog);
  EquivariantMap qTl = resample_map_to_grid(run.final_map, glog);
  double stat_dist = dist_h1(qTl, q0l);
  double sec_a = tm_a.seconds();

  // 7b: energy conservation for delta = 0.05 over [0, 0.05] -- shared with 8
  Timer tm_b;
  BumpSpec spec;
  spec.center_x = 0.1;
  spec.width_x = 0.6;
  spec.phase = 0.4;
  auto u0 = perturbed_harmonic(1, 0.05, spec, glog);
  shared.initial_log = u0;
  shared.grid = gd;
  DirectEvolveConfig dc2;
  dc2.t_end = 0.05;
  dc2.gauge_grid = glog;
  dc2.extract_gauge = true;
  shared.res = evolve_direct(resample_map_to_grid(u0, gd), dc2);
  double e0 = shared.res.trajectory.records.front().energy;
  double drift = 0;
  for (const auto& rec : shared.res.trajectory.records)
    drift = std::max(drift, std::abs(rec.energy - e0) / e0);
  double sec_b = tm_b.seconds();

  // 7c: temporal self-convergence order >= 2 on a coarse grid
  auto gc = build_direct_grid(2e-2, 3.0, 1.03, 2e3);
  EquivariantMap uc = resample_map_to_grid(perturbed_harmonic(1, 0.2, {}, glog), gc);
  auto run_dt = [&](double dt) {
    DirectEvolveConfig c;
    c.dt = dt;
    c.t_end = 2e-2;
    c.extract_gauge = false;
    DirectEvolver ev(uc, c);
    long steps = long(std::llround(c.t_end / dt));
    for (long k = 0; k < steps; ++k) ev.step();
    return ev.map();
  };
  auto a = run_dt(4e-5), b = run_dt(2e-5), c = run_dt(1e-5);
  auto diff = [&](const EquivariantMap& x, const EquivariantMap& y) {
    double acc = 0;
    for (std::size_t i = 0; i < gc->size(); ++i)
      acc += gc->weights()[i] * (x.v.v[i] - y.v.v[i]).norm2();
    return std::sqrt(acc);
  };
  double order = std::log2(diff(a, b) / diff(b, c));

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "Q dist %.3e (%.0f s), energy drift %.3e (%.0f s), dt order %.2f", stat_dist,
                sec_a, drift, sec_b, order);
  report(7, stat_dist <= 1e-6 && drift <= 1e-4 && order >= 2.0,
         "direct solver: stationarity, conservation, order", buf);
}

// --------------------------------------------------------------- criterion 8
void criterion_pipeline_equivalence(const DirectRun& shared) {
  Timer tm;
  auto glog = default_grid();
  int m = 1;
  const auto& u0 = shared.initial_log;

  // gauged pipeline from matched initial data
  auto gd0 = gauge_data(u0, build_frame(u0));
  auto pair0 = solve_scaling_pair(u0);
  GaugedState st0{gd0.q, pair0.s, pair0.alpha, m};
  GaugedEvolveConfig gc;
  gc.dt = 1e-4;
  gc.t_end = 0.05;
  gc.record_every = 25;
  gc.track_closest = false;
  auto gres = evolve_gauged(st0, gc);
  bool gauged_ok = gres.trajectory.halt == HaltReason::Completed;

  EquivariantMap direct_l = resample_map_to_grid(shared.res.final_map, glog);
  double dist_default = gauged_ok ? dist_h1(direct_l, gres.final_map) : 1e9;

  // coarse rung of the same experiment: refinement must reduce the gap
  auto gcoarse = build_direct_grid(1.8e-3, 3.0, 1.012, 1e4);
  DirectEvolveConfig dc;
  dc.t_end = 0.05;
  dc.extract_gauge = false;
  auto run_c = evolve_direct(resample_map_to_grid(u0, gcoarse), dc);
  GaugedEvolveConfig gc2 = gc;
  gc2.dt = 2e-4;
  auto gres_c = evolve_gauged(st0, gc2);
  bool coarse_ok = gres_c.trajectory.halt == HaltReason::Completed &&
                   run_c.trajectory.halt == HaltReason::Completed;
  double dist_coarse =
      coarse_ok ? dist_h1(resample_map_to_grid(run_c.final_map, glog), gres_c.final_map)
                : -1.0;

  // modulation ODE against finite differences of the direct-run pair
  const auto& recs = shared.res.trajectory.records;
  std::size_t nfit = 0;
  while (nfit < recs.size() && recs[nfit].t <= 4e-3) ++nfit;
  nfit = std::max<std::size_t>(nfit, 3);
  double sx = 0, sxx = 0, ss = 0, sxs = 0, sa = 0, sxa = 0;
  for (std::size_t k = 0; k < nfit; ++k) {
    sx += recs[k].t;
    sxx += recs[k].t * recs[k].t;
    ss += recs[k].s;
    sxs += recs[k].t * recs[k].s;
    sa += recs[k].alpha;
    sxa += recs[k].t * recs[k].alpha;
  }
  double den = nfit * sxx - sx * sx;
  double fd_ds = (nfit * sxs - sx * ss) / den;
  double fd_da = (nfit * sxa - sx * sa) / den;

  auto d0 = decompose(u0, pair0);
  auto coef = assemble_ode_coefficients(d0, m);
  auto rhs = modulation_rhs(coef, pair0.s, m);
  double rel_ds = std::abs(rhs.ds_dt - fd_ds) / std::max(std::abs(fd_ds), 1e-12);
  double rel_da = std::abs(rhs.dalpha_dt - fd_da) / std::max(std::abs(fd_da), 1e-12);

  double sec = tm.seconds();
  char buf[280];
  std::snprintf(buf, sizeof(buf),
                "dist %.3e (coarse %.3e), ode rel (%.2f%%, %.2f%%), %.0f s", dist_default,
                dist_coarse, 100 * rel_ds, 100 * rel_da, sec);
  report(8,
         gauged_ok && coarse_ok && dist_default <= 1e-2 && dist_default < dist_coarse &&
             rel_ds <= 0.10 && rel_da <= 0.10 && sec < 300.0,
         "pipeline equivalence and modulation oracle", buf);
}

// --------------------------------------------------------------- criterion 9
void criterion_proximity() {
  auto glog = default_grid();
  int m = 1;
  std::vector<double> ratios;
  int skipped = 0;
  for (double delta : {0.01, 0.02, 0.05}) {
    BumpSpec spec;
    spec.center_x = 0.1;
    spec.width_x = 0.6;
    spec.phase = 0.4;
    auto u0 = perturbed_harmonic(m, delta, spec, glog);
    auto gd0 = gauge_data(u0, build_frame(u0));
    auto pair0 = solve_scaling_pair(u0);
    GaugedEvolveConfig gc;
    gc.dt = 1e-4;
    gc.t_end = 0.02;
    gc.record_every = 20;
    gc.track_closest = true;
    auto res = evolve_gauged({gd0.q, pair0.s, pair0.alpha, m}, gc);
    if (res.trajectory.halt != HaltReason::Completed) {
      report(9, false, "pair stays within C delta of the closest-map pair", "run halted");
      return;
    }
    double ratio = 0;
    for (const auto& rec : res.trajectory.records) {
      if (rec.s_star <= 0) {
        ++skipped;
        continue;
      }
      double v = std::abs(rec.s / rec.s_star - 1.0) + std::abs(wrap(rec.alpha - rec.alpha_star));
      ratio = std::max(ratio, v / delta);
    }
    ratios.push_back(ratio);
  }
  // bounded by a delta-independent constant: a fixed C works for the whole
  // sweep and the ratio does not blow up as delta shrinks
  double worst = std::max({ratios[0], ratios[1], ratios[2]});
  bool no_blowup = ratios[0] <= 2.0 * std::max(ratios[1], ratios[2]) + 1e-4;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "ratios %.3e / %.3e / %.3e at delta 0.01/0.02/0.05 (%d records skipped)",
                ratios[0], ratios[1], ratios[2], skipped);
  report(9, worst <= 2.0 && no_blowup && skipped == 0,
         "pair stays within C delta of the closest-map pair", buf);
}

// -------------------------------------------------------------- criterion 10
void criterion_determinism() {
  std::string cfg_path = "/tmp/smap_accept_det.cfg";
  std::ofstream(cfg_path) << "[experiment]\nm = 1\npipeline = both\nseed = 7\n"
                             "[grid]\nn = 1024\nr_min = 1e-4\nr_max = 1e4\n"
                             "[direct]\ndr_core = 4e-3\nr_core = 2.0\nratio = 1.02\n"
                             "[initial]\ntype = perturbed-harmonic\ndelta = 0.03\n"
                             "[time]\ndt = 5e-4\nT = 2e-3\n";
  std::string cli = SMAP_CLI_PATH;
  int rc1 = std::system((cli + " simulate --config " + cfg_path +
                         " --out /tmp/smap_accept_a --quiet").c_str());
  int rc2 = std::system((cli + " simulate --config " + cfg_path +
                         " --out /tmp/smap_accept_b --quiet").c_str());
  bool ok = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0;
  for (const char* f : {"gauged.jsonl", "direct.jsonl", "summary.txt"}) {
    std::string a = slurp(std::string("/tmp/smap_accept_a/") + f);
    std::string b = slurp(std::string("/tmp/smap_accept_b/") + f);
    ok = ok && !a.empty() && a == b;
  }
  report(10, ok, "fixed seed reproduces byte-identical outputs",
         ok ? "gauged.jsonl, direct.jsonl, summary.txt identical" : "mismatch");
}

}  // namespace

template <class F>
void guarded(int idx, const char* what, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(idx, false, what, std::string("exception: ") + e.what());
  }
}

int main() {
  std::printf("== acceptance suite ==\n");
  Timer total;
  guarded(1, "harmonic family energy", criterion_energy);
  guarded(2, "gauge vanishing", criterion_gauge_vanishing);
  guarded(3, "energy identity / nonlocal", criterion_energy_identity_and_nonlocal);
  guarded(5, "modulation solver", criterion_modulation_solver);
  guarded(6, "round trips", criterion_round_trips);
  DirectRun shared;
  guarded(7, "direct solver", [&] { criterion_direct_solver(shared); });
  guarded(8, "pipeline equivalence", [&] { criterion_pipeline_equivalence(shared); });
  guarded(9, "pair proximity", criterion_proximity);
  guarded(10, "determinism", criterion_determinism);
  std::printf("== %s (%d failures, %.0f s) ==\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
              g_failures, total.seconds());
  return g_failures == 0 ? 0 : 1;
}
