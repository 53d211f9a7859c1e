#include "smap/modulation.hpp"

#include <cmath>

namespace smap {

namespace {

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace

Decomposition decompose(const EquivariantMap& u, const ModulationState& state) {
  if (!(state.s > 0)) throw ConfigError("modulation scale must be positive");
  const auto& g = u.grid();
  const int m = u.m;
  Vec3Field w = rotate_profile(resample_profile(u.v, state.s, m), -state.alpha);

  Decomposition d;
  d.z = ComplexField(g);
  d.gamma = RealField(g);
  d.xi = Vec3Field(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double r = g->r()[i];
    double h1 = h1_of(r, m), h3 = h3_of(r, m);
    const Vec3& wi = w.v[i];
    double z1 = wi.y;
    double z2 = -wi.x * h3 + wi.z * h1;
    double gam = wi.x * h1 + wi.z * h3 - 1.0;
    d.z.v[i] = Complex{z1, z2};
    d.gamma.v[i] = gam;
    d.xi.v[i] = Vec3{-z2 * h3 + gam * h1, z1, z2 * h1 + gam * h3};
  }
  return d;
}

FMapValue f_map(const EquivariantMap& u, const ModulationState& state) {
  Decomposition d = decompose(u, state);
  const int m = u.m;

  Complex primary = pair_n0h1(d.z, m);

  // cross-check route: direct H1e pairing with h1
  auto h1 = h1_field(u.grid(), m);
  RealField z1(u.grid()), z2(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    z1.v[i] = d.z.v[i].real();
    z2.v[i] = d.z.v[i].imag();
  }
  double alt1 = inner_h1e(h1, z1, m);
  double alt2 = inner_h1e(h1, z2, m);

  FMapValue out;
  out.f1 = primary.real();
  out.f2 = primary.imag();
  double scale = h1_norm2_h1e(m) * std::max(1.0, h1e_norm(d.z, m));
  out.route_disagreement =
      std::hypot(out.f1 - alt1, out.f2 - alt2) / scale;
  return out;
}

ModulationState solve_scaling_pair(const EquivariantMap& u, const ModulationState& init) {
  const int m = u.m;
  const double fscale = h1_norm2_h1e(m);
  ModulationState st = init;

  auto F = [&](const ModulationState& s) {
    FMapValue f = f_map(u, s);
    return std::array<double, 2>{f.f1, f.f2};
  };

  std::array<double, 2> f = F(st);
  for (int it = 0; it < 50; ++it) {
    double fn = std::max(std::abs(f[0]), std::abs(f[1]));
    if (fn <= 1e-13 * fscale) {
      st.alpha = wrap_angle(st.alpha);
      return st;
    }
    const double eps_s = 1e-6 * st.s, eps_a = 1e-6;
    auto fs = F({st.s + eps_s, st.alpha});
    auto fa = F({st.s, st.alpha + eps_a});
    // J = [dF/ds, dF/dalpha]
    double j11 = (fs[0] - f[0]) / eps_s, j12 = (fa[0] - f[0]) / eps_a;
    double j21 = (fs[1] - f[1]) / eps_s, j22 = (fa[1] - f[1]) / eps_a;
    double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-14 * fscale * fscale)
      throw NumericalError("solve_scaling_pair: singular Jacobian");
    double ds = (-f[0] * j22 + f[1] * j12) / det;
    double da = (-j11 * f[1] + j21 * f[0]) / det;
    // keep s positive; halve steps that would overshoot the chart
    double lim = 0.5 * st.s;
    if (std::abs(ds) > lim) {
      double fac = lim / std::abs(ds);
      ds *= fac;
      da *= fac;
    }
    st.s += ds;
    st.alpha += da;
    if (!(st.s > 0)) throw NumericalError("solve_scaling_pair: scale left the chart");
    f = F(st);
  }
  throw NumericalError("solve_scaling_pair: no convergence in 50 iterations");
}

ModulationState solve_scaling_pair(const EquivariantMap& u) {
  auto ch = closest_harmonic(u);
  return solve_scaling_pair(u, ch.state);
}

ClosestHarmonic closest_harmonic(const EquivariantMap& u, double admission_delta) {
  const auto& g = u.grid();
  const int m = u.m;
  const std::size_t n = g->size();
  const double e = energy(u);
  const double excess = e - 4.0 * M_PI * m;
  if (excess > admission_delta * admission_delta)
    throw NumericalError("closest_harmonic: outside tubular neighborhood of the family");

  // || u - e^{aR}Q_s ||^2 = ||u||^2 + 8 pi m - 2 ( A(s) cos a + B(s) sin a + C(s) )
  // with A, B, C pairings of v against the scaled profile in the H1 metric.
  Vec3Field vr = deriv_r_hi(u.v);
  const auto& w = g->weights();
  const auto& r = g->r();
  double u_h1sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double mr = m / r[i];
    u_h1sq += w[i] * (vr.v[i].norm2() +
                      mr * mr * (u.v.v[i].x * u.v.v[i].x + u.v.v[i].y * u.v.v[i].y));
  }
  u_h1sq *= 2.0 * M_PI;

  auto objective = [&](double s, double* alpha_out) {
    double A = 0, B = 0, C = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double rr = r[i] / s;
      double g1 = h1_of(rr, m), g3 = h3_of(rr, m);
      double dg1 = dh1_of(rr, m) / s, dg3 = dh3_of(rr, m) / s;
      double mr = m / r[i];
      A += w[i] * (vr.v[i].x * dg1 + mr * mr * u.v.v[i].x * g1);
      B += w[i] * (vr.v[i].y * dg1 + mr * mr * u.v.v[i].y * g1);
      C += w[i] * (vr.v[i].z * dg3);
      (void)g3;
    }
    A *= 2.0 * M_PI;
    B *= 2.0 * M_PI;
    C *= 2.0 * M_PI;
    double amp = std::hypot(A, B);
    if (alpha_out) *alpha_out = std::atan2(B, A);
    return u_h1sq + 8.0 * M_PI * m - 2.0 * (amp + C);
  };

  // coarse log scan then golden-section refinement
  double best_s = 1.0, best_obj = std::numeric_limits<double>::infinity();
  for (int k = -30; k <= 30; ++k) {
    double s = std::exp(0.1 * k);
    double obj = objective(s, nullptr);
    if (obj < best_obj) {
      best_obj = obj;
      best_s = s;
    }
  }
  double lo = best_s * std::exp(-0.1), hi = best_s * std::exp(0.1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo), b = std::log(hi);
  double c1 = b - gr * (b - a), c2 = a + gr * (b - a);
  double f1 = objective(std::exp(c1), nullptr), f2 = objective(std::exp(c2), nullptr);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - gr * (b - a);
      f1 = objective(std::exp(c1), nullptr);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + gr * (b - a);
      f2 = objective(std::exp(c2), nullptr);
    }
  }
  double s_star = std::exp(0.5 * (a + b));
  double alpha_star = 0;
  objective(s_star, &alpha_star);
  ClosestHarmonic out;
  out.state = {s_star, wrap_angle(alpha_star)};
  // distance from the difference field; the expansion route cancels ~||u||^2
  // and would floor the distance at the quadrature error
  out.dist = dist_h1(u, harmonic_map(m, {out.state.s, out.state.alpha}, g));
  return out;
}

}  // namespace smap
