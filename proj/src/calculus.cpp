#include "smap/calculus.hpp"

#include <array>
#include <cmath>

namespace smap {

namespace {

template <class T>
T weighted_sum(const Field<T>& f) {
  const auto& w = f.grid->weights();
  T acc{};
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f.v[i];
  return acc;
}

// definite integral over [a, b] of the cubic through (xs[j], fs[j]), xs local
template <class T>
T cubic_panel(const std::array<double, 4>& xs, const std::array<T, 4>& fs, double a, double b) {
  // Newton divided differences
  T c0 = fs[0];
  T c1 = (fs[1] - fs[0]) * (1.0 / (xs[1] - xs[0]));
  T d12 = (fs[2] - fs[1]) * (1.0 / (xs[2] - xs[1]));
  T d23 = (fs[3] - fs[2]) * (1.0 / (xs[3] - xs[2]));
  T c2 = (d12 - c1) * (1.0 / (xs[2] - xs[0]));
  T c3 = ((d23 - d12) * (1.0 / (xs[3] - xs[1])) - c2) * (1.0 / (xs[3] - xs[0]));
  // expand p(x) = c0 + c1(x-x0) + c2(x-x0)(x-x1) + c3(x-x0)(x-x1)(x-x2)
  double p0 = xs[0], p1 = xs[1], p2 = xs[2];
  // monomial coefficients a0..a3
  T a3 = c3;
  T a2 = c2 - c3 * (p0 + p1 + p2);
  T a1 = c1 - c2 * (p0 + p1) + c3 * (p0 * p1 + p0 * p2 + p1 * p2);
  T a0 = c0 - c1 * p0 + c2 * p0 * p1 - c3 * p0 * p1 * p2;
  auto F = [&](double t) {
    return a0 * t + a1 * (t * t / 2) + a2 * (t * t * t / 3) + a3 * (t * t * t * t / 4);
  };
  return F(b) - F(a);
}

template <class T>
Field<T> tail_integral_impl(const Field<T>& f) {
  const auto& r = f.grid->r();
  const std::size_t n = f.size();
  Field<T> out(f.grid);
  T acc{};
  out.v[n - 1] = acc;
  for (std::size_t i = n - 1; i-- > 0;) {
    std::size_t i0 = (i == 0) ? 0 : i - 1;
    if (i0 + 4 > n) i0 = n - 4;
    std::array<double, 4> xs;
    std::array<T, 4> fs;
    for (int j = 0; j < 4; ++j) {
      xs[j] = r[i0 + j] - r[i];
      fs[j] = f.v[i0 + j];
    }
    acc += cubic_panel(xs, fs, 0.0, r[i + 1] - r[i]);
    out.v[i] = acc;
  }
  return out;
}

// second-order first derivative on three nonuniform points, evaluated at x1
template <class T>
T d3_mid(double h0, double h1, const T& f0, const T& f1, const T& f2) {
  // f'(x1) with x1-x0 = h0, x2-x1 = h1
  double a = -h1 / (h0 * (h0 + h1));
  double b = (h1 - h0) / (h0 * h1);
  double c = h0 / (h1 * (h0 + h1));
  return a * f0 + b * f1 + c * f2;
}

template <class T>
Field<T> deriv_r_impl(const Field<T>& f) {
  const auto& r = f.grid->r();
  const std::size_t n = f.size();
  if (n < 3) throw ConfigError("derivative needs at least 3 nodes");
  Field<T> out(f.grid);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out.v[i] = d3_mid(r[i] - r[i - 1], r[i + 1] - r[i], f.v[i - 1], f.v[i], f.v[i + 1]);
  }
  {  // one-sided second order at the ends
    double h0 = r[1] - r[0], h1 = r[2] - r[1];
    double a = -(2 * h0 + h1) / (h0 * (h0 + h1));
    double b = (h0 + h1) / (h0 * h1);
    double c = -h0 / (h1 * (h0 + h1));
    out.v[0] = a * f.v[0] + b * f.v[1] + c * f.v[2];
  }
  {
    double h0 = r[n - 2] - r[n - 3], h1 = r[n - 1] - r[n - 2];
    double a = h1 / (h0 * (h0 + h1));
    double b = -(h0 + h1) / (h0 * h1);
    double c = (h0 + 2 * h1) / (h1 * (h0 + h1));
    out.v[n - 1] = a * f.v[n - 3] + b * f.v[n - 2] + c * f.v[n - 1];
  }
  return out;
}

// high-order d/dx on the uniform transformed coordinate, then chain rule:
// 7-point 6th-order interior, 5-point 4th-order near the (flat) ends
template <class T>
Field<T> deriv_hi_impl(const Field<T>& f) {
  const auto& g = *f.grid;
  if (!g.uniform_x() || g.size() < 8) return deriv_r_impl(f);
  const std::size_t n = f.size();
  const double dx = g.dx();
  Field<T> out(f.grid);
  const auto& fv = f.v;
  for (std::size_t i = 3; i + 3 < n; ++i) {
    out.v[i] = (-(fv[i - 3] - fv[i + 3]) + 9.0 * (fv[i - 2] - fv[i + 2]) -
                45.0 * (fv[i - 1] - fv[i + 1])) *
               (1.0 / (60.0 * dx));
  }
  for (std::size_t i : {std::size_t(2), n - 3}) {
    out.v[i] = (fv[i - 2] - 8.0 * fv[i - 1] + 8.0 * fv[i + 1] - fv[i + 2]) * (1.0 / (12.0 * dx));
  }
  auto edge = [&](std::size_t i0, int sgn, std::size_t at) {
    // 5-point one-sided stencils, offsets 0..4 from i0 in direction sgn
    static const double c0[5] = {-25, 48, -36, 16, -3};
    static const double c1[5] = {-3, -10, 18, -6, 1};
    const double* c = (at == i0) ? c0 : c1;
    T acc{};
    for (int j = 0; j < 5; ++j) acc += c[j] * fv[i0 + sgn * j];
    return acc * (sgn / (12.0 * dx));
  };
  out.v[0] = edge(0, +1, 0);
  out.v[1] = edge(0, +1, 1);
  out.v[n - 1] = edge(n - 1, -1, n - 1);
  out.v[n - 2] = edge(n - 1, -1, n - 2);
  if (g.spacing() == Spacing::Log) {
    const auto& r = g.r();
    for (std::size_t i = 0; i < n; ++i) out.v[i] *= 1.0 / r[i];
  }
  return out;
}

template <class T>
T interp_at_impl(const Field<T>& f, double xq) {
  const auto& g = *f.grid;
  const auto& xs = g.x();
  const std::size_t n = f.size();
  if (!g.uniform_x()) {
    // composite grids: locate by binary search, local cubic
    auto it = std::lower_bound(xs.begin(), xs.end(), xq);
    std::size_t i = (it == xs.begin()) ? 0 : std::size_t(it - xs.begin()) - 1;
    i = std::min(std::max<std::size_t>(i, 1), n - 3);
    std::array<double, 4> px;
    std::array<T, 4> pf;
    for (int j = 0; j < 4; ++j) {
      px[j] = xs[i - 1 + j];
      pf[j] = f.v[i - 1 + j];
    }
    T acc{};
    for (int j = 0; j < 4; ++j) {
      double lj = 1.0;
      for (int k = 0; k < 4; ++k)
        if (k != j) lj *= (xq - px[k]) / (px[j] - px[k]);
      acc += lj * pf[j];
    }
    return acc;
  }
  const double dx = g.dx();
  double t = (xq - xs.front()) / dx;
  double tr = std::round(t);
  if (std::abs(t - tr) < 1e-9 && tr >= 0 && tr < double(n)) {
    return f.v[std::size_t(tr)];  // snap to node
  }
  long i = long(std::floor(t));
  i = std::max(1L, std::min(i, long(n) - 3));
  double u = t - double(i);
  double wm1 = -u * (u - 1) * (u - 2) / 6.0;
  double w0 = (u + 1) * (u - 1) * (u - 2) / 2.0;
  double w1 = -(u + 1) * u * (u - 2) / 2.0;
  double w2 = (u + 1) * u * (u - 1) / 6.0;
  return wm1 * f.v[i - 1] + w0 * f.v[i] + w1 * f.v[i + 1] + w2 * f.v[i + 2];
}

}  // namespace

double integrate_rdr(const RealField& f) {
  if (!all_finite(f)) throw NumericalError("integrate_rdr: non-finite input");
  return weighted_sum(f);
}
Complex integrate_rdr(const ComplexField& f) {
  if (!all_finite(f)) throw NumericalError("integrate_rdr: non-finite input");
  return weighted_sum(f);
}

double l2e_norm(const RealField& f) {
  const auto& w = f.grid->weights();
  double acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f.v[i] * f.v[i];
  return std::sqrt(acc);
}
double l2e_norm(const ComplexField& f) {
  const auto& w = f.grid->weights();
  double acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * std::norm(f.v[i]);
  return std::sqrt(acc);
}
double l2e_norm(const Vec3Field& f) {
  const auto& w = f.grid->weights();
  double acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f.v[i].norm2();
  return std::sqrt(acc);
}

RealField tail_integral(const RealField& f) { return tail_integral_impl(f); }
ComplexField tail_integral(const ComplexField& f) { return tail_integral_impl(f); }

RealField deriv_r(const RealField& f) { return deriv_r_impl(f); }
ComplexField deriv_r(const ComplexField& f) { return deriv_r_impl(f); }
Vec3Field deriv_r(const Vec3Field& f) { return deriv_r_impl(f); }

RealField deriv_r_hi(const RealField& f) { return deriv_hi_impl(f); }
ComplexField deriv_r_hi(const ComplexField& f) { return deriv_hi_impl(f); }
Vec3Field deriv_r_hi(const Vec3Field& f) { return deriv_hi_impl(f); }

double interp_at(const RealField& f, double xq) { return interp_at_impl(f, xq); }
Complex interp_at(const ComplexField& f, double xq) { return interp_at_impl(f, xq); }

ComplexField resample_scaled(const ComplexField& f, double scale) {
  if (scale == 1.0) return f;
  const auto& g = *f.grid;
  const double shift = (g.spacing() == Spacing::Log) ? std::log(scale) : 0.0;
  ComplexField out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double xq = (g.spacing() == Spacing::Log) ? g.x()[i] + shift : g.r()[i] * scale;
    if (xq < g.x().front() - 1e-12 || xq > g.x().back() + 1e-12) {
      out.v[i] = Complex{};
    } else {
      out.v[i] = interp_at(f, xq);
    }
  }
  return out;
}

Vec3Field resample_scaled_vec(const Vec3Field& f, double scale) {
  if (scale == 1.0) return f;
  const auto& g = *f.grid;
  Vec3Field out(f.grid);
  RealField c(f.grid);
  for (int k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < f.size(); ++i)
      c.v[i] = (k == 0) ? f.v[i].x : (k == 1) ? f.v[i].y : f.v[i].z;
    for (std::size_t i = 0; i < f.size(); ++i) {
      double xq = (g.spacing() == Spacing::Log) ? g.x()[i] + std::log(scale) : g.r()[i] * scale;
      double val = 0.0;
      if (xq >= g.x().front() - 1e-12 && xq <= g.x().back() + 1e-12) val = interp_at(c, xq);
      if (k == 0) out.v[i].x = val;
      else if (k == 1) out.v[i].y = val;
      else out.v[i].z = val;
    }
  }
  return out;
}

}  // namespace smap
