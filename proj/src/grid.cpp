#include "smap/grid.hpp"

#include <cmath>

namespace smap {

std::string to_string(Spacing s) {
  switch (s) {
    case Spacing::Log: return "log";
    case Spacing::Uniform: return "uniform";
    case Spacing::Composite: return "composite";
  }
  return "?";
}

Spacing spacing_from_string(const std::string& s) {
  if (s == "log") return Spacing::Log;
  if (s == "uniform") return Spacing::Uniform;
  if (s == "composite") return Spacing::Composite;
  throw ConfigError("unknown grid spacing '" + s + "'");
}

RadialGrid::RadialGrid(std::vector<double> nodes, Spacing spacing)
    : r_(std::move(nodes)), spacing_(spacing) {
  const std::size_t n = r_.size();
  if (n < 16) throw ConfigError("grid needs at least 16 nodes");
  if (r_.front() <= 0.0) throw ConfigError("grid nodes must be positive");
  for (std::size_t i = 1; i < n; ++i)
    if (r_[i] <= r_[i - 1]) throw ConfigError("grid nodes must be strictly increasing");

  x_.resize(n);
  w_.resize(n);
  if (spacing_ == Spacing::Log) {
    for (std::size_t i = 0; i < n; ++i) x_[i] = std::log(r_[i]);
  } else {
    x_ = r_;
  }

  if (spacing_ == Spacing::Composite) {
    // nonuniform trapezoid in r with the r dr Jacobian
    for (std::size_t i = 0; i < n; ++i) {
      double dl = (i > 0) ? r_[i] - r_[i - 1] : 0.0;
      double dr = (i + 1 < n) ? r_[i + 1] - r_[i] : 0.0;
      w_[i] = r_[i] * 0.5 * (dl + dr);
    }
  } else {
    dx_ = (x_.back() - x_.front()) / double(n - 1);
    // trapezoid in x; Jacobian of r dr is r^2 on Log grids, r on Uniform
    for (std::size_t i = 0; i < n; ++i) {
      double jac = (spacing_ == Spacing::Log) ? r_[i] * r_[i] : r_[i];
      w_[i] = jac * dx_ * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
    }
  }
}

GridPtr build_grid(double r_min, double r_max, std::size_t n, Spacing spacing) {
  if (!(r_min > 0.0) || !(r_max > 0.0)) throw ConfigError("grid bounds must be positive");
  if (!(r_min < r_max)) throw ConfigError("grid requires r_min < r_max");
  if (n < 16) throw ConfigError("grid needs at least 16 nodes");
  if (spacing == Spacing::Composite)
    throw ConfigError("composite grids are built by the direct solver");

  std::vector<double> r(n);
  if (spacing == Spacing::Log) {
    const double x0 = std::log(r_min), x1 = std::log(r_max);
    const double dx = (x1 - x0) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) r[i] = std::exp(x0 + double(i) * dx);
  } else {
    const double dr = (r_max - r_min) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) r[i] = r_min + double(i) * dr;
  }
  r.front() = r_min;
  r.back() = r_max;
  return std::make_shared<RadialGrid>(std::move(r), spacing);
}

GridPtr default_grid() {
  static GridPtr g = build_grid(kDefaultRMin, kDefaultRMax, kDefaultN, Spacing::Log);
  return g;
}

}  // namespace smap
