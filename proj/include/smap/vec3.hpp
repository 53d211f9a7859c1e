#pragma once

#include <cmath>

namespace smap {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }

  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
};

inline Vec3 operator*(double a, const Vec3& v) { return v * a; }

// generator of rotations about the vertical axis: R w = k x w
inline Vec3 rot_gen(const Vec3& w) { return {-w.y, w.x, 0.0}; }

// e^{a R}: rotation by angle a about the vertical axis
inline Vec3 rotz(const Vec3& w, double ca, double sa) {
  return {ca * w.x - sa * w.y, sa * w.x + ca * w.y, w.z};
}
inline Vec3 rotz(const Vec3& w, double a) { return rotz(w, std::cos(a), std::sin(a)); }

inline constexpr Vec3 kKhat{0.0, 0.0, 1.0};

}  // namespace smap
