#include "smap/gauge.hpp"

#include <cmath>
#include <cstdio>

namespace smap {

namespace {

// midpoint values between consecutive nodes of a uniform-x grid:
// 6-point Lagrange at the half point, clamped stencil at the ends
Vec3 midpoint(const Vec3Field& f, std::size_t i) {
  // midpoint of interval (i-1, i)
  const std::size_t n = f.v.size();
  std::size_t i0 = (i >= 3) ? i - 3 : 0;
  if (i0 + 6 > n) i0 = n - 6;
  const double t = (double(i) - 0.5) - double(i0);  // in units of dx
  Vec3 acc{};
  for (int j = 0; j < 6; ++j) {
    double lj = 1.0;
    for (int k = 0; k < 6; ++k)
      if (k != j) lj *= (t - k) / double(j - k);
    acc += lj * f.v[i0 + j];
  }
  return acc;
}

}  // namespace

GaugeFrame build_frame(const EquivariantMap& u) {
  const auto& g = *u.grid();
  if (!g.uniform_x())
    throw ConfigError("frame transport requires a log or uniform grid");
  const std::size_t n = g.size();
  const Vec3 vn = u.v.v.back();
  if ((vn - kKhat).norm() > 0.1)
    throw NumericalError("outer boundary not in gauge chart");

  // dv/dx at nodes and midpoints (x the transformed coordinate)
  Vec3Field vx = deriv_r_hi(u.v);
  if (g.spacing() == Spacing::Log) {
    for (std::size_t i = 0; i < n; ++i) vx.v[i] *= g.r()[i];
  }

  GaugeFrame fr;
  fr.e_hat = Vec3Field(u.grid());
  fr.f_hat = Vec3Field(u.grid());

  Vec3 e = Vec3{1, 0, 0} - Vec3{1, 0, 0}.dot(vn) * vn;
  e = e.normalized();
  fr.e_hat.v[n - 1] = e;

  const double h = -g.dx();  // integrating inward
  for (std::size_t i = n - 1; i > 0; --i) {
    const Vec3 v1 = u.v.v[i], v0 = u.v.v[i - 1];
    const Vec3 vm = midpoint(u.v, i).normalized();
    const Vec3 d1 = vx.v[i], d0 = vx.v[i - 1];
    const Vec3 dm = midpoint(vx, i);
    auto rhs = [](const Vec3& ev, const Vec3& v, const Vec3& dv) {
      return -(ev.dot(dv)) * v;
    };
    Vec3 k1 = rhs(e, v1, d1);
    Vec3 k2 = rhs(e + (h / 2) * k1, vm, dm);
    Vec3 k3 = rhs(e + (h / 2) * k2, vm, dm);
    Vec3 k4 = rhs(e + h * k3, v0, d0);
    e += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    e -= e.dot(v0) * v0;  // transport preserves e.v = 0; drift is discretization
    e = e.normalized();
    fr.e_hat.v[i - 1] = e;
  }
  for (std::size_t i = 0; i < n; ++i)
    fr.f_hat.v[i] = u.v.v[i].cross(fr.e_hat.v[i]);
  return fr;
}

GaugeData gauge_data(const EquivariantMap& u, const GaugeFrame& frame) {
  const auto& g = *u.grid();
  const auto& r = g.r();
  const std::size_t n = g.size();
  const int m = u.m;

  GaugeData gd;
  gd.W = Vec3Field(u.grid());
  gd.q = ComplexField(u.grid());
  gd.nu = ComplexField(u.grid());

  Vec3Field vr = deriv_r_hi(u.v);
  RealField v3(u.grid());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& v = u.v.v[i];
    v3.v[i] = v.z;
    Vec3 jrv = v.cross(rot_gen(v));
    gd.W.v[i] = vr.v[i] - (double(m) / r[i]) * jrv;
    const Vec3& e = frame.e_hat.v[i];
    const Vec3& je = frame.f_hat.v[i];
    gd.q.v[i] = Complex{gd.W.v[i].dot(e), gd.W.v[i].dot(je)};
    gd.nu.v[i] = Complex{jrv.dot(e), jrv.dot(je)};
  }

  // p = i (q_r + q/r - (m/r) v3 q)
  ComplexField qr = deriv_r_hi(gd.q);
  gd.p = ComplexField(u.grid());
  for (std::size_t i = 0; i < n; ++i) {
    Complex lin = qr.v[i] + gd.q.v[i] / r[i] - (double(m) / r[i]) * v3.v[i] * gd.q.v[i];
    gd.p.v[i] = Complex{0, 1} * lin;
  }

  // temporal connection from a_r = Im[ conj(p) (q + (m/r) nu) ], a(oo) = 0
  RealField ar(u.grid());
  for (std::size_t i = 0; i < n; ++i) {
    Complex c = gd.q.v[i] + (double(m) / r[i]) * gd.nu.v[i];
    ar.v[i] = std::imag(std::conj(gd.p.v[i]) * c);
  }
  RealField atail = tail_integral(ar);
  gd.conn = RealField(u.grid());
  for (std::size_t i = 0; i < n; ++i) gd.conn.v[i] = -atail.v[i];

  // consistency tolerance follows the scheme's 4th-order error on coarser grids
  double dx_ratio = g.uniform_x() ? g.dx() / 4.5e-3 : 4.0;
  double tol = 1e-6 * std::max(1.0, std::pow(dx_ratio, 4.0));
  gd.n_of_q = nonlocal_n(gd.q, gd.nu, v3, m, tol);
  return gd;
}

RealField nonlocal_n(const ComplexField& q, const ComplexField& nu, const RealField& v3,
                     int m, double tol, double* rel_discrepancy) {
  require_same_grid(q.grid, nu.grid);
  require_same_grid(q.grid, v3.grid);
  const auto& r = q.grid->r();
  const std::size_t n = q.size();

  // direct form
  ComplexField qr = deriv_r_hi(q);
  RealField direct_integrand(q.grid);
  for (std::size_t i = 0; i < n; ++i) {
    Complex a = std::conj(q.v[i]) + (double(m) / r[i]) * std::conj(nu.v[i]);
    Complex b = qr.v[i] + (1.0 - double(m) * v3.v[i]) / r[i] * q.v[i];
    direct_integrand.v[i] = std::real(a * b);
  }
  RealField n_direct = tail_integral(direct_integrand);

  // V-form
  RealField V(q.grid), two_v_over_r(q.grid);
  for (std::size_t i = 0; i < n; ++i) {
    V.v[i] = 0.5 * std::norm(q.v[i]) +
             std::real((double(m) / r[i]) * std::conj(nu.v[i]) * q.v[i]);
    two_v_over_r.v[i] = 2.0 * V.v[i] / r[i];
  }
  RealField vtail = tail_integral(two_v_over_r);
  RealField n_vform(q.grid);
  for (std::size_t i = 0; i < n; ++i) n_vform.v[i] = -V.v[i] + vtail.v[i];

  double num = 0, den = 0;
  const auto& w = q.grid->weights();
  for (std::size_t i = 0; i < n; ++i) {
    double d = n_direct.v[i] - n_vform.v[i];
    num += w[i] * d * d;
    den += w[i] * n_vform.v[i] * n_vform.v[i];
  }
  // the dropped tail beyond r_n equals V(r_n) for the V-form; pin the outer
  // node to the empty-range value
  n_vform.v[n - 1] = 0.0;

  double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
  if (rel_discrepancy) *rel_discrepancy = rel;
  // below the discretization noise floor of q both forms are pure noise;
  // only flag disagreement carrying actual magnitude
  double qn = l2e_norm(q);
  if (rel > tol && std::sqrt(num) > 1e-8 * (1.0 + qn))
    throw NumericalError("nonlocal_n: integration-by-parts identity violated");
  return n_vform;
}

void save_gauge_data(const GaugeData& gd, int m, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw ConfigError("cannot open '" + path + "' for writing");
  const auto& g = *gd.q.grid;
  std::fprintf(fp, "# gauge-data m=%d n=%zu spacing=%s r_min=%.17g r_max=%.17g\n",
               m, g.size(), to_string(g.spacing()).c_str(), g.r_min(), g.r_max());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::fprintf(fp, "%.17g %.17g %.17g %.17g %.17g %.17g\n", g.r()[i],
                 gd.q.v[i].real(), gd.q.v[i].imag(), gd.nu.v[i].real(), gd.nu.v[i].imag(),
                 gd.n_of_q.v[i]);
  }
  std::fclose(fp);
}

}  // namespace smap
