#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "smap/grid.hpp"

namespace smap {

// Samples of a function (0,oo) -> T on a RadialGrid.
template <class T>
struct Field {
  GridPtr grid;
  std::vector<T> v;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), v(grid->size(), T{}) {}
  Field(GridPtr g, std::vector<T> vals) : grid(std::move(g)), v(std::move(vals)) {
    if (v.size() != grid->size()) throw ConfigError("field/grid size mismatch");
  }

  std::size_t size() const { return v.size(); }
  T& operator[](std::size_t i) { return v[i]; }
  const T& operator[](std::size_t i) const { return v[i]; }
};

using RealField = Field<double>;
using ComplexField = Field<Complex>;
using Vec3Field = Field<Vec3>;

template <class T>
bool finite(const T& x) {
  return std::isfinite(x);
}
inline bool finite(const Complex& x) {
  return std::isfinite(x.real()) && std::isfinite(x.imag());
}
inline bool finite(const Vec3& x) {
  return std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(x.z);
}

template <class T>
bool all_finite(const Field<T>& f) {
  return std::all_of(f.v.begin(), f.v.end(), [](const T& x) { return finite(x); });
}

inline void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (a.get() == b.get()) return;
  // structurally equal grids (e.g. reloaded from disk) are interchangeable
  if (a && b && a->size() == b->size() && a->spacing() == b->spacing() &&
      a->r() == b->r())
    return;
  throw ConfigError("fields live on different grids");
}

}  // namespace smap
