#pragma once

#include <cmath>

#include "smap/field.hpp"

namespace smap {

// Closed forms for the equivariant harmonic profile h = (h1, 0, h3) and the
// combinations of it the gauge reduction keeps reusing.
//
//   h1 = 2 r^m / (r^{2m} + 1),   h3 = (r^{2m} - 1) / (r^{2m} + 1)
//   h1' = -(m/r) h1 h3,          h3' =  (m/r) h1^2
//   N0 h1 = 2 m^2 h1^3 / r^2                       (N0 = -H_m)
//   L0 N0 h1 = -(4 m^2 h1^3 / r^3)(m h3 + 1)       (L0 = d_r + (m/r) h3)
//   ||h1||^2_{H1e} = 8m/3

inline double h1_of(double r, int m) {
  double rm = std::pow(r, m);
  return 2.0 * rm / (rm * rm + 1.0);
}
inline double h3_of(double r, int m) {
  double r2m = std::pow(r, 2 * m);
  return (r2m - 1.0) / (r2m + 1.0);
}
inline double dh1_of(double r, int m) { return -(m / r) * h1_of(r, m) * h3_of(r, m); }
inline double dh3_of(double r, int m) {
  double h1 = h1_of(r, m);
  return (m / r) * h1 * h1;
}
inline double n0h1_of(double r, int m) {
  double h1 = h1_of(r, m);
  return 2.0 * m * m * h1 * h1 * h1 / (r * r);
}
inline double l0n0h1_of(double r, int m) {
  double h1 = h1_of(r, m);
  return -(4.0 * m * m * h1 * h1 * h1 / (r * r * r)) * (m * h3_of(r, m) + 1.0);
}

inline double h1_norm2_h1e(int m) { return 8.0 * m / 3.0; }

RealField h1_field(const GridPtr& g, int m);
RealField h3_field(const GridPtr& g, int m);
RealField n0h1_field(const GridPtr& g, int m);

}  // namespace smap
