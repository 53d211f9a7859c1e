#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "smap/vec3.hpp"

namespace smap {

using Complex = std::complex<double>;

// Thrown on invalid configuration / file input (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on numerical failures: divergence, chart exit, instability (CLI exit code 1).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Spacing { Log, Uniform, Composite };

std::string to_string(Spacing s);
Spacing spacing_from_string(const std::string& s);

// Discretized half-line (0, oo) carrying quadrature weights for the measure r dr.
//
// Log and Uniform grids are uniform in a transformed coordinate x (x = ln r
// resp. x = r); weights are trapezoid in x with the Jacobian of r dr folded in.
// Composite grids (uniform core + geometric tail, built by the direct solver)
// carry nonuniform trapezoid weights.
class RadialGrid {
 public:
  RadialGrid(std::vector<double> nodes, Spacing spacing);

  std::size_t size() const { return r_.size(); }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& weights() const { return w_; }
  const std::vector<double>& x() const { return x_; }  // transformed coordinate
  double dx() const { return dx_; }                    // step in x (0 for Composite)
  Spacing spacing() const { return spacing_; }
  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }
  bool uniform_x() const { return spacing_ != Spacing::Composite; }

  bool same_as(const RadialGrid& o) const { return this == &o; }

 private:
  std::vector<double> r_, w_, x_;
  double dx_ = 0;
  Spacing spacing_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Grid factory. Log spacing places nodes geometrically, uniform arithmetically.
// Rejects r_min >= r_max, non-positive bounds, n < 16.
GridPtr build_grid(double r_min, double r_max, std::size_t n, Spacing spacing);

// Default working grid of the gauge pipeline.
GridPtr default_grid();

constexpr double kDefaultRMin = 1e-4;
constexpr double kDefaultRMax = 1e4;
constexpr std::size_t kDefaultN = 4096;

}  // namespace smap
