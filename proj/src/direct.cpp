#include "smap/direct.hpp"

#include <cmath>

namespace smap {

GridPtr build_direct_grid(double dr_core, double r_core, double ratio, double r_max) {
  if (!(dr_core > 0) || !(r_core > dr_core) || !(ratio > 1.0) || !(r_max > r_core))
    throw ConfigError("direct grid parameters are inconsistent");
  std::vector<double> r;
  r.reserve(std::size_t(r_core / dr_core) + 1024);
  for (double x = dr_core; x <= r_core + 0.5 * dr_core; x += dr_core) r.push_back(x);
  double step = dr_core;
  while (r.back() < r_max) {
    step *= ratio;
    r.push_back(r.back() + step);
  }
  r.back() = r_max;
  if (r[r.size() - 1] <= r[r.size() - 2]) r.erase(r.end() - 2);
  return std::make_shared<RadialGrid>(std::move(r), Spacing::Composite);
}

Vec3Field direct_rhs(const EquivariantMap& u) {
  HkStencil st_m = build_hk_stencil(u.grid(), u.m);
  HkStencil st_0 = build_hk_stencil(u.grid(), 0);
  const std::size_t n = u.size();
  Vec3Field out(u.grid());
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 acc{};
    auto add = [&](std::size_t j, double wm, double w0) {
      acc.x += wm * u.v.v[j].x;
      acc.y += wm * u.v.v[j].y;
      acc.z += w0 * u.v.v[j].z;
    };
    add(i, st_m.diag[i], st_0.diag[i]);
    if (i > 0) add(i - 1, st_m.sub[i], st_0.sub[i]);
    if (i + 1 < n) add(i + 1, st_m.sup[i], st_0.sup[i]);
    out.v[i] = u.v.v[i].cross(acc);
  }
  out.v.front() = Vec3{};
  out.v.back() = Vec3{};
  return out;
}

DirectEvolver::DirectEvolver(EquivariantMap initial, const DirectEvolveConfig& cfg)
    : u_(std::move(initial)),
      st_m_(build_hk_stencil(u_.grid(), u_.m)),
      st_0_(build_hk_stencil(u_.grid(), 0)),
      instability_norm_(cfg.instability_norm) {
  const auto& r = u_.grid()->r();
  double mind = r[1] - r[0];
  for (std::size_t i = 1; i + 1 < r.size(); ++i) mind = std::min(mind, r[i + 1] - r[i]);
  dt_ = (cfg.dt > 0) ? cfg.dt : cfg.cfl * mind * mind;
  const std::size_t n = u_.size();
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

void DirectEvolver::rhs_into(const std::vector<Vec3>& v, std::vector<Vec3>& out) const {
  const long n = long(v.size());
#pragma omp parallel for schedule(static)
  for (long i = 1; i < n - 1; ++i) {
    Vec3 acc;
    acc.x = st_m_.diag[i] * v[i].x + st_m_.sub[i] * v[i - 1].x + st_m_.sup[i] * v[i + 1].x;
    acc.y = st_m_.diag[i] * v[i].y + st_m_.sub[i] * v[i - 1].y + st_m_.sup[i] * v[i + 1].y;
    acc.z = st_0_.diag[i] * v[i].z + st_0_.sub[i] * v[i - 1].z + st_0_.sup[i] * v[i + 1].z;
    out[i] = v[i].cross(acc);
  }
  out[0] = Vec3{};
  out[n - 1] = Vec3{};
}

void DirectEvolver::step() {
  const long n = long(u_.size());
  auto& v = u_.v.v;
  rhs_into(v, k1_);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) tmp_[i] = v[i] + (0.5 * dt_) * k1_[i];
  rhs_into(tmp_, k2_);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) tmp_[i] = v[i] + (0.5 * dt_) * k2_[i];
  rhs_into(tmp_, k3_);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) tmp_[i] = v[i] + dt_ * k3_[i];
  rhs_into(tmp_, k4_);

  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (long i = 0; i < n; ++i) {
    Vec3 nv = v[i] + (dt_ / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    double nn = nv.norm();
    if (std::abs(nn - 1.0) > instability_norm_) bad = true;
    v[i] = (1.0 / nn) * nv;
  }
  if (bad) throw NumericalError("direct solver: profile left the sphere (instability)");
  t_ += dt_;
}

EquivariantMap resample_map_to_grid(const EquivariantMap& u, const GridPtr& dst) {
  const auto& src = *u.grid();
  const auto& rs = src.r();
  const std::size_t ns = src.size();

  // interpolate in the source's own radius coordinate: composite cores are
  // uniform in r (sparse per log-decade near the axis), log grids interpolate
  // equally well either way since 4-point stencils see smooth local spacing
  EquivariantMap out;
  out.m = u.m;
  out.v = Vec3Field(dst);
  const double r_lo = rs.front(), r_hi = rs.back();
  for (std::size_t i = 0; i < dst->size(); ++i) {
    double rq = dst->r()[i];
    if (rq < r_lo) {
      double fac = std::pow(rq / r_lo, u.m);
      double a = u.v.v.front().x * fac, b = u.v.v.front().y * fac;
      out.v.v[i] = Vec3{a, b, -std::sqrt(std::max(0.0, 1.0 - a * a - b * b))};
    } else if (rq > r_hi) {
      double fac = std::pow(r_hi / rq, u.m);
      double a = u.v.v.back().x * fac, b = u.v.v.back().y * fac;
      out.v.v[i] = Vec3{a, b, std::sqrt(std::max(0.0, 1.0 - a * a - b * b))};
    } else {
      auto it = std::lower_bound(rs.begin(), rs.end(), rq);
      std::size_t j = (it == rs.begin()) ? 0 : std::size_t(it - rs.begin()) - 1;
      j = std::min(std::max<std::size_t>(j, 1), ns - 3);
      Vec3 acc{};
      for (int k = 0; k < 4; ++k) {
        double lj = 1.0;
        for (int l = 0; l < 4; ++l)
          if (l != k) lj *= (rq - rs[j - 1 + l]) / (rs[j - 1 + k] - rs[j - 1 + l]);
        acc += lj * u.v.v[j - 1 + k];
      }
      out.v.v[i] = acc;
    }
  }
  normalize_profile(out);
  return out;
}

DirectEvolveResult evolve_direct(const EquivariantMap& initial, const DirectEvolveConfig& cfg) {
  DirectEvolver ev(initial, cfg);
  const double dt = ev.dt();
  const long nsteps = long(std::ceil(cfg.t_end / dt - 1e-12));
  long every = cfg.record_every > 0 ? cfg.record_every : std::max(1L, nsteps / 64);
  GridPtr gauge_grid = cfg.gauge_grid ? cfg.gauge_grid : default_grid();

  Trajectory tr;
  StrichartzAccumulator str;
  int snapshot_index = 0;
  ModulationState warm{1.0, 0.0};
  bool have_warm = false;

  auto record = [&](double t) {
    DiagnosticsRecord rec;
    rec.t = t;
    rec.energy = energy(ev.map());
    if (cfg.extract_gauge) {
      EquivariantMap ul = resample_map_to_grid(ev.map(), gauge_grid);
      try {
        auto gd = gauge_data(ul, build_frame(ul));
        rec.q_l2 = l2e_norm(gd.q);
        rec.q_h1 = h1e_norm(gd.q, ul.m);
        auto ch = closest_harmonic(ul);
        rec.s_star = ch.state.s;
        rec.alpha_star = ch.state.alpha;
        auto pair = have_warm ? solve_scaling_pair(ul, warm) : solve_scaling_pair(ul, ch.state);
        warm = pair;
        have_warm = true;
        rec.s = pair.s;
        rec.alpha = pair.alpha;
        double l2x = std::sqrt(2.0 * M_PI) * rec.q_l2;
        double i4 = 0, i8 = 0;
        for (std::size_t i = 0; i < gauge_grid->size(); ++i) {
          double a2 = std::norm(gd.q.v[i]);
          i4 += gauge_grid->weights()[i] * a2 * a2;
          i8 += gauge_grid->weights()[i] * a2 * a2 * a2 * a2;
        }
        str.add(dt * double(every), l2x, std::pow(2.0 * M_PI * i4, 0.25),
                std::pow(2.0 * M_PI * i8, 0.125));
        rec.str_linf_l2 = str.linf_l2();
        rec.str_l4l4 = str.l4l4();
        rec.str_l83l8 = str.l83l8();
        auto sn = sobolev_norms(ul);
        auto hq = apply_hk(gd.q, ul.m + 1);
        double i6 = 0;
        for (std::size_t i = 0; i < gauge_grid->size(); ++i) {
          double a2 = std::norm(gd.q.v[i]);
          i6 += gauge_grid->weights()[i] * a2 * a2 * a2;
        }
        rec.h3_ratio =
            sn.h3 / (l2e_norm(hq) + std::pow(i6, 1.0 / 3.0) + 1.0 / (rec.s * rec.s));
      } catch (const NumericalError&) {
        // gauge extraction can leave the chart late in unstable runs
      }
    }
    tr.records.push_back(rec);
    if (cfg.on_record) cfg.on_record(t, ev.map());
  };

  try {
    record(0.0);
    for (long step = 0; step < nsteps; ++step) {
      ev.step();
      if ((step + 1) % every == 0 || step + 1 == nsteps) record(ev.time());
      if (cfg.snapshot_every > 0 && (step + 1) % cfg.snapshot_every == 0) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s_%06d.profile", cfg.snapshot_prefix.c_str(),
                      ++snapshot_index);
        save_profile(ev.map(), buf);
      }
    }
  } catch (const NumericalError& e) {
    tr.halt = HaltReason::Instability;
    tr.halt_detail = e.what();
  }

  DirectEvolveResult res;
  res.trajectory = std::move(tr);
  res.final_map = ev.map();
  return res;
}

}  // namespace smap
