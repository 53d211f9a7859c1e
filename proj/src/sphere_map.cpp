#include "smap/sphere_map.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <random>

#include "smap/operators.hpp"

namespace smap {

void validate_map(const EquivariantMap& u, const BoundaryTol& tol) {
  if (u.m < 1) throw ConfigError("equivariance index must be a positive integer");
  if (!all_finite(u.v)) throw NumericalError("map profile has non-finite samples");
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u.v.v[i].norm() - 1.0) > 1e-12)
      throw NumericalError("map profile leaves the unit sphere");
  }
  const Vec3 v0 = u.v.v.front(), vn = u.v.v.back();
  if ((v0 + kKhat).norm() > tol.inner)
    throw NumericalError("map violates v(0) = -k at the inner boundary");
  if ((vn - kKhat).norm() > tol.outer)
    throw NumericalError("map violates v(oo) = +k at the outer boundary");
}

void normalize_profile(EquivariantMap& u) {
  for (auto& p : u.v.v) p = p.normalized();
}

EquivariantMap harmonic_map(int m, HarmonicParams p, const GridPtr& g) {
  if (!(p.s > 0.0)) throw ConfigError("harmonic map scale must be positive");
  if (m < 1) throw ConfigError("equivariance index must be a positive integer");
  EquivariantMap u;
  u.m = m;
  u.v = Vec3Field(g);
  const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double rr = g->r()[i] / p.s;
    u.v.v[i] = rotz(Vec3{h1_of(rr, m), 0.0, h3_of(rr, m)}, ca, sa);
  }
  return u;
}

Vec3Field resample_profile(const Vec3Field& v, double scale, int m) {
  if (scale == 1.0) return v;
  const auto& g = *v.grid;
  const std::size_t n = v.v.size();
  Vec3Field out(v.grid);

  RealField c1(v.grid), c2(v.grid), c3(v.grid);
  for (std::size_t i = 0; i < n; ++i) {
    c1.v[i] = v.v[i].x;
    c2.v[i] = v.v[i].y;
    c3.v[i] = v.v[i].z;
  }
  const bool logg = g.spacing() == Spacing::Log;
  const double shift = logg ? std::log(scale) : 0.0;
  const double x_lo = g.x().front(), x_hi = g.x().back();
  for (std::size_t i = 0; i < n; ++i) {
    const double xq = logg ? g.x()[i] + shift : g.r()[i] * scale;
    if (xq < x_lo - 1e-12) {
      // below the grid: (v1,v2) ~ r^m toward -k
      double fac = logg ? std::exp(double(m) * (xq - x_lo))
                        : std::pow(xq / x_lo, m);
      double a = v.v.front().x * fac, b = v.v.front().y * fac;
      double z2 = std::max(0.0, 1.0 - a * a - b * b);
      out.v[i] = Vec3{a, b, -std::sqrt(z2)};
    } else if (xq > x_hi + 1e-12) {
      // beyond the grid: (v1,v2) ~ r^{-m} toward +k
      double fac = logg ? std::exp(-double(m) * (xq - x_hi))
                        : std::pow(x_hi / xq, m);
      double a = v.v.back().x * fac, b = v.v.back().y * fac;
      double z2 = std::max(0.0, 1.0 - a * a - b * b);
      out.v[i] = Vec3{a, b, std::sqrt(z2)};
    } else {
      out.v[i] = Vec3{interp_at(c1, xq), interp_at(c2, xq), interp_at(c3, xq)};
    }
  }
  return out;
}

Vec3Field rotate_profile(const Vec3Field& v, double alpha) {
  if (alpha == 0.0) return v;
  Vec3Field out(v.grid);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  for (std::size_t i = 0; i < v.v.size(); ++i) out.v[i] = rotz(v.v[i], ca, sa);
  return out;
}

namespace {

double energy_like(const EquivariantMap& u, double* tension_out) {
  const auto& g = *u.grid();
  const auto& r = g.r();
  const auto& w = g.weights();
  Vec3Field vr = deriv_r_hi(u.v);
  double e_acc = 0, t_acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Vec3& v = u.v.v[i];
    double mr = u.m / r[i];
    e_acc += w[i] * (vr.v[i].norm2() + mr * mr * (v.x * v.x + v.y * v.y));
    if (tension_out) {
      Vec3 jrv = v.cross(rot_gen(v));
      Vec3 W = vr.v[i] - mr * jrv;
      t_acc += w[i] * W.norm2();
    }
  }
  if (tension_out) *tension_out = M_PI * t_acc;
  return M_PI * e_acc;
}

}  // namespace

double energy(const EquivariantMap& u) { return energy_like(u, nullptr); }

BogomolnySplit bogomolny_split(const EquivariantMap& u) {
  BogomolnySplit out;
  energy_like(u, &out.tension);
  out.topological = 4.0 * M_PI * u.m;
  return out;
}

double h1_seminorm(const EquivariantMap& u) { return std::sqrt(2.0 * energy(u)); }

double dist_h1(const EquivariantMap& a, const EquivariantMap& b) {
  if (a.m != b.m) throw ConfigError("dist_h1: maps have different equivariance index");
  require_same_grid(a.grid(), b.grid());
  const auto& g = *a.grid();
  const auto& r = g.r();
  const auto& w = g.weights();
  Vec3Field dv(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) dv.v[i] = a.v.v[i] - b.v.v[i];
  Vec3Field dvr = deriv_r_hi(dv);
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double mr = a.m / r[i];
    acc += w[i] * (dvr.v[i].norm2() + mr * mr * (dv.v[i].x * dv.v[i].x + dv.v[i].y * dv.v[i].y));
  }
  return std::sqrt(std::max(0.0, 2.0 * M_PI * acc));
}

SobolevNorms sobolev_norms(const EquivariantMap& u) {
  const auto& g = u.grid();
  const std::size_t n = u.size();
  RealField v1(g), v2(g), v3(g);
  for (std::size_t i = 0; i < n; ++i) {
    v1.v[i] = u.v.v[i].x;
    v2.v[i] = u.v.v[i].y;
    v3.v[i] = u.v.v[i].z;
  }
  SobolevNorms out;
  out.h1 = h1_seminorm(u);

  RealField a1 = apply_hk(v1, u.m), a2 = apply_hk(v2, u.m), a3 = apply_hk(v3, 0);
  double acc2 = 0;
  const auto& w = g->weights();
  for (std::size_t i = 0; i < n; ++i)
    acc2 += w[i] * (a1.v[i] * a1.v[i] + a2.v[i] * a2.v[i] + a3.v[i] * a3.v[i]);
  out.h2 = std::sqrt(2.0 * M_PI * acc2);

  // third order from the radial equivalents of grad(Delta u)
  RealField d1 = deriv_r_hi(a1), d2 = deriv_r_hi(a2), d3 = deriv_r_hi(a3);
  const auto& r = g->r();
  double acc3 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double inv_r = 1.0 / r[i];
    acc3 += w[i] * (d1.v[i] * d1.v[i] + d2.v[i] * d2.v[i] + d3.v[i] * d3.v[i] +
                    inv_r * inv_r * (a1.v[i] * a1.v[i] + a2.v[i] * a2.v[i]));
  }
  out.h3 = std::sqrt(2.0 * M_PI * acc3);
  return out;
}

double stationarity_residual(const EquivariantMap& u) {
  const auto& g = u.grid();
  const std::size_t n = u.size();
  RealField v1(g), v2(g), v3(g);
  for (std::size_t i = 0; i < n; ++i) {
    v1.v[i] = u.v.v[i].x;
    v2.v[i] = u.v.v[i].y;
    v3.v[i] = u.v.v[i].z;
  }
  RealField a1 = apply_hk(v1, u.m), a2 = apply_hk(v2, u.m), a3 = apply_hk(v3, 0);
  Vec3Field res(g);
  for (std::size_t i = 0; i < n; ++i)
    res.v[i] = u.v.v[i].cross(Vec3{a1.v[i], a2.v[i], a3.v[i]});
  // boundary rows carry one-sided stencil junk over negligible cell measure
  res.v.front() = Vec3{};
  res.v.back() = Vec3{};
  return l2e_norm(res);
}

EquivariantMap map_from_tangent_seed(int m, const ComplexField& z) {
  const auto& g = z.grid;
  EquivariantMap u;
  u.m = m;
  u.v = Vec3Field(g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    double rr = g->r()[i];
    double h1 = h1_of(rr, m), h3 = h3_of(rr, m);
    double z1 = z.v[i].real(), z2 = z.v[i].imag();
    double zz = z1 * z1 + z2 * z2;
    if (zz >= 1.0) throw NumericalError("tangent seed exceeds the chart (|z| >= 1)");
    double gam = std::sqrt(1.0 - zz) - 1.0;
    // v = z1 j + z2 J^h j + (1+gamma) h
    u.v.v[i] = Vec3{-z2 * h3 + (1.0 + gam) * h1, z1, z2 * h1 + (1.0 + gam) * h3};
  }
  normalize_profile(u);
  return u;
}

EquivariantMap perturbed_harmonic(int m, double delta, const BumpSpec& spec, const GridPtr& g) {
  if (delta < 0) throw ConfigError("delta must be nonnegative");
  auto build = [&](double amp) {
    ComplexField z(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
      double t = (g->x()[i] - spec.center_x) / spec.width_x;
      double bump = amp * std::exp(-0.5 * t * t);
      z.v[i] = Complex{bump * std::cos(spec.phase), bump * std::sin(spec.phase)};
    }
    return map_from_tangent_seed(m, z);
  };
  if (delta == 0.0) return harmonic_map(m, {}, g);

  // secant on the seed amplitude; delta(amp) is near-linear in the small regime
  double a0 = std::min(spec.amplitude, 0.5);
  EquivariantMap u = build(a0);
  double d0 = std::sqrt(std::max(0.0, energy(u) - 4.0 * M_PI * m));
  double a1 = a0 * delta / std::max(d0, 1e-14);
  for (int it = 0; it < 30; ++it) {
    a1 = std::min(a1, 0.9);
    u = build(a1);
    double d1 = std::sqrt(std::max(0.0, energy(u) - 4.0 * M_PI * m));
    if (std::abs(d1 - delta) <= 1e-10 * std::max(1.0, delta)) return u;
    double slope = (d1 - d0) / (a1 - a0);
    a0 = a1;
    d0 = d1;
    a1 = a1 + (delta - d1) / slope;
    if (!(a1 > 0)) a1 = a0 * 0.5;
  }
  return u;
}

EquivariantMap random_perturbed(int m, double delta_max, std::uint64_t seed, const GridPtr& g) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  BumpSpec spec;
  spec.center_x = -1.0 + 2.0 * U(rng);
  spec.width_x = 0.3 + 0.9 * U(rng);
  spec.phase = 2.0 * M_PI * U(rng);
  double delta = delta_max * (0.2 + 0.8 * U(rng));
  return perturbed_harmonic(m, delta, spec, g);
}

void save_profile(const EquivariantMap& u, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw ConfigError("cannot open '" + path + "' for writing");
  const auto& g = *u.grid();
  std::fprintf(fp, "# equivariant-profile m=%d n=%zu spacing=%s r_min=%.17g r_max=%.17g\n",
               u.m, g.size(), to_string(g.spacing()).c_str(), g.r_min(), g.r_max());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::fprintf(fp, "%.17g %.17g %.17g %.17g\n", g.r()[i], u.v.v[i].x, u.v.v[i].y, u.v.v[i].z);
  }
  std::fclose(fp);
}

EquivariantMap load_profile(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "r");
  if (!fp) throw ConfigError("cannot open profile file '" + path + "'");
  char header[512];
  if (!std::fgets(header, sizeof(header), fp)) {
    std::fclose(fp);
    throw ConfigError("profile file '" + path + "' is empty");
  }
  int m = 0;
  std::size_t n = 0;
  char spacing_buf[32] = {0};
  if (std::sscanf(header, "# equivariant-profile m=%d n=%zu spacing=%31s", &m, &n, spacing_buf) != 3) {
    std::fclose(fp);
    throw ConfigError("profile file '" + path + "' has a malformed header");
  }
  std::string spacing_str(spacing_buf);
  auto eq = spacing_str.find('=');
  if (eq != std::string::npos) spacing_str = spacing_str.substr(eq + 1);
  std::vector<double> r(n);
  std::vector<Vec3> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fscanf(fp, "%lg %lg %lg %lg", &r[i], &v[i].x, &v[i].y, &v[i].z) != 4) {
      std::fclose(fp);
      throw ConfigError("profile file '" + path + "' truncated");
    }
  }
  std::fclose(fp);
  auto grid = std::make_shared<RadialGrid>(std::move(r), spacing_from_string(spacing_str));
  EquivariantMap u;
  u.m = m;
  u.v = Vec3Field(grid, std::move(v));
  return u;
}

}  // namespace smap
