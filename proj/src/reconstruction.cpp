#include "smap/reconstruction.hpp"

#include <cmath>
#include <cstdio>

namespace smap {

namespace {

// map assembled from z at the reference scale, then rescaled/rotated:
// v(r) = e^{aR} [ h + z1 j + z2 J^h j + gamma h ](r/s)
EquivariantMap assemble_map(const ComplexField& z, double s, double alpha, int m) {
  const auto& g = z.grid;
  EquivariantMap w;
  w.m = m;
  w.v = Vec3Field(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double r = g->r()[i];
    double h1 = h1_of(r, m), h3 = h3_of(r, m);
    double z1 = z.v[i].real(), z2 = z.v[i].imag();
    double zz = z1 * z1 + z2 * z2;
    if (zz >= 1.0) throw NumericalError("reconstruct: |z| reached the chart boundary");
    double gam = std::sqrt(1.0 - zz) - 1.0;
    w.v.v[i] = Vec3{-z2 * h3 + (1.0 + gam) * h1, z1, z2 * h1 + (1.0 + gam) * h3};
  }
  EquivariantMap u;
  u.m = m;
  u.v = rotate_profile(resample_profile(w.v, 1.0 / s, m), alpha);
  normalize_profile(u);
  return u;
}

}  // namespace

EquivariantMap reconstruct(const GaugedState& state, ReconstructStats* stats,
                           const ReconstructOptions& opts) {
  const auto& g = state.q.grid;
  const int m = state.m;
  const double s = state.s, alpha = state.alpha;
  if (!(s > 0)) throw ConfigError("reconstruct: scale must be positive");
  const double qn = l2e_norm(state.q);
  if (qn > opts.admission_l2)
    throw NumericalError("reconstruct: ||q|| above the admission threshold");

  const std::size_t n = g->size();
  const double ca = std::cos(alpha), sa = std::sin(alpha);

  ComplexField z(g);
  double prev_update = 0;
  int bad_streak = 0;
  ReconstructStats st;

  EquivariantMap u;
  for (int it = 0; it < opts.max_iters; ++it) {
    u = assemble_map(z, s, alpha, m);
    GaugeFrame frame = build_frame(u);

    // frame field q1 e + q2 J e, evaluated at s r, rotated back, coordinated
    Vec3Field qe(g);
    for (std::size_t i = 0; i < n; ++i) {
      qe.v[i] = state.q.v[i].real() * frame.e_hat.v[i] +
                state.q.v[i].imag() * frame.f_hat.v[i];
    }
    Vec3Field qes = resample_scaled_vec(qe, s);
    ComplexField rhs(g);
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 lhs = s * rotz(qes.v[i], ca, -sa);  // e^{-aR}
      double r = g->r()[i];
      double h1 = h1_of(r, m), h3 = h3_of(r, m);
      double lhs_j = lhs.y;
      double lhs_jh = -lhs.x * h3 + lhs.z * h1;
      double z1 = z.v[i].real(), z2 = z.v[i].imag();
      double gam = std::sqrt(std::max(0.0, 1.0 - z1 * z1 - z2 * z2)) - 1.0;
      double xi3 = z2 * h1 + gam * h3;
      // quadratic remainder of the structural identity, in (j, J^h j) coords
      double g0_j = (m / r) * xi3 * z1;
      double g0_jh = (m / r) * (gam * h1 + xi3 * z2);
      rhs.v[i] = Complex{lhs_j - g0_j, lhs_jh - g0_jh};
    }

    ComplexField znew = solve_l0(rhs, m);
    double dz = 0, zn = 0;
    const auto& w = g->weights();
    for (std::size_t i = 0; i < n; ++i) {
      dz += w[i] * std::norm(znew.v[i] - z.v[i]);
      zn += w[i] * std::norm(znew.v[i]);
    }
    dz = std::sqrt(dz);
    zn = std::sqrt(zn);
    z = znew;
    st.iterations = it + 1;
    st.final_update = dz / std::max(1.0, zn);

    if (it > 0 && prev_update > 0) {
      double ratio = dz / prev_update;
      st.contraction_max = std::max(st.contraction_max, ratio);
      bad_streak = (ratio >= 1.0) ? bad_streak + 1 : 0;
      if (bad_streak >= 5)
        throw NumericalError("reconstruct: q too large for reconstruction chart");
    }
    prev_update = dz;
    if (st.final_update <= opts.tol) break;
  }
  if (st.final_update > opts.tol)
    throw NumericalError("reconstruct: fixed point did not converge");

  u = assemble_map(z, s, alpha, m);
  if (stats) *stats = st;
  return u;
}

double reconstruction_modulus(const GaugedState& state, const GaugedState& perturbation) {
  require_same_grid(state.q.grid, perturbation.q.grid);
  double dq_h1e = h1e_norm(perturbation.q, state.m);
  double size = dq_h1e + std::abs(perturbation.s) + std::abs(perturbation.alpha);
  if (size == 0.0) return 0.0;

  GaugedState moved = state;
  for (std::size_t i = 0; i < state.q.size(); ++i) moved.q.v[i] += perturbation.q.v[i];
  moved.s += perturbation.s;
  moved.alpha += perturbation.alpha;

  EquivariantMap u0 = reconstruct(state);
  EquivariantMap u1 = reconstruct(moved);
  // H2 distance of the difference field
  const auto& g = state.q.grid;
  RealField d1(g), d2(g), d3(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    Vec3 d = u1.v.v[i] - u0.v.v[i];
    d1.v[i] = d.x;
    d2.v[i] = d.y;
    d3.v[i] = d.z;
  }
  auto a1 = apply_hk(d1, state.m), a2 = apply_hk(d2, state.m), a3 = apply_hk(d3, 0);
  double acc = 0;
  const auto& w = g->weights();
  for (std::size_t i = 0; i < g->size(); ++i)
    acc += w[i] * (a1.v[i] * a1.v[i] + a2.v[i] * a2.v[i] + a3.v[i] * a3.v[i]);
  double dh2 = std::sqrt(2.0 * M_PI * acc);
  return dh2 / size;
}

void save_gauged_state(const GaugedState& st, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw ConfigError("cannot open '" + path + "' for writing");
  const auto& g = *st.q.grid;
  std::fprintf(fp, "# gauged-state m=%d s=%.17g alpha=%.17g n=%zu spacing=%s r_min=%.17g r_max=%.17g\n",
               st.m, st.s, st.alpha, g.size(), to_string(g.spacing()).c_str(), g.r_min(),
               g.r_max());
  for (std::size_t i = 0; i < g.size(); ++i)
    std::fprintf(fp, "%.17g %.17g %.17g\n", g.r()[i], st.q.v[i].real(), st.q.v[i].imag());
  std::fclose(fp);
}

GaugedState load_gauged_state(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "r");
  if (!fp) throw ConfigError("cannot open gauged-state file '" + path + "'");
  char header[512];
  if (!std::fgets(header, sizeof(header), fp)) {
    std::fclose(fp);
    throw ConfigError("gauged-state file '" + path + "' is empty");
  }
  GaugedState st;
  std::size_t n = 0;
  char spacing_buf[32] = {0};
  if (std::sscanf(header, "# gauged-state m=%d s=%lg alpha=%lg n=%zu spacing=%31s", &st.m, &st.s,
                  &st.alpha, &n, spacing_buf) != 5) {
    std::fclose(fp);
    throw ConfigError("gauged-state file '" + path + "' has a malformed header");
  }
  std::vector<double> r(n);
  std::vector<Complex> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    double re = 0, im = 0;
    if (std::fscanf(fp, "%lg %lg %lg", &r[i], &re, &im) != 3) {
      std::fclose(fp);
      throw ConfigError("gauged-state file '" + path + "' truncated");
    }
    q[i] = Complex{re, im};
  }
  std::fclose(fp);
  auto grid = std::make_shared<RadialGrid>(std::move(r), spacing_from_string(spacing_buf));
  st.q = ComplexField(grid, std::move(q));
  return st;
}

}  // namespace smap
