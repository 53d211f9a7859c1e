#pragma once

#include "smap/field.hpp"

namespace smap {

// Quadrature for int_0^oo f(r) r dr on the grid's weights. NaN input is rejected.
double integrate_rdr(const RealField& f);
Complex integrate_rdr(const ComplexField& f);

// Weighted L2 norm ||f||_{L2_e} = sqrt(int |f|^2 r dr).
double l2e_norm(const RealField& f);
double l2e_norm(const ComplexField& f);
double l2e_norm(const Vec3Field& f);

// g(r_i) = int_{r_i}^{r_n} f dr (plain dr), cumulative from the outer boundary;
// g(r_n) = 0. Integrates the local cubic through 4-point stencils (4th order).
RealField tail_integral(const RealField& f);
ComplexField tail_integral(const ComplexField& f);

// Second-order finite-difference d/dr on the (possibly nonuniform) grid,
// one-sided at the endpoints.
RealField deriv_r(const RealField& f);
ComplexField deriv_r(const ComplexField& f);
Vec3Field deriv_r(const Vec3Field& f);

// Higher-order d/dr used where norm identities need derivative error below
// quadrature error: 5-point 4th-order stencils in the transformed coordinate
// on Log/Uniform grids, falling back to deriv_r on Composite grids.
RealField deriv_r_hi(const RealField& f);
ComplexField deriv_r_hi(const ComplexField& f);
Vec3Field deriv_r_hi(const Vec3Field& f);

// ---- interpolation / resampling on the transformed coordinate ----

// Cubic Lagrange interpolation of samples on a uniform-x grid, evaluated at
// xq (transformed coordinate). Queries within 1e-9*dx of a node return the
// node value exactly. Out-of-range queries are the caller's responsibility
// (use the resample_* helpers below).
double interp_at(const RealField& f, double xq);
Complex interp_at(const ComplexField& f, double xq);

// f evaluated at scaled radii (scale*r_i), i.e. at x_i + log(scale) on Log
// grids; outside the grid the field is extended by zero. scale == 1 is exact.
ComplexField resample_scaled(const ComplexField& f, double scale);
Vec3Field resample_scaled_vec(const Vec3Field& f, double scale);

}  // namespace smap
