#pragma once

#include <cmath>

namespace swarm {

// Planar vector. Used for positions (m), velocities (m/s) and forces.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(const Vec2& a) { return dot(a, a); }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
// Counter-clockwise quarter turn.
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

inline Vec2 unit_from_angle(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline bool is_finite(const Vec2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

// Rescales `a` to length `limit` when it is longer, keeping its direction.
inline Vec2 clamp_norm(const Vec2& a, double limit) {
  const double n = norm(a);
  if (n > limit && n > 0.0) return a * (limit / n);
  return a;
}

// 2x2 tensor, row-major: t[a][b] with a, b in {x, y}.
struct Tensor2 {
  double xx = 0.0;
  double xy = 0.0;
  double yx = 0.0;
  double yy = 0.0;

  friend constexpr bool operator==(const Tensor2&, const Tensor2&) = default;
};

constexpr Tensor2 operator+(const Tensor2& a, const Tensor2& b) {
  return {a.xx + b.xx, a.xy + b.xy, a.yx + b.yx, a.yy + b.yy};
}
constexpr Tensor2 operator*(const Tensor2& a, double s) {
  return {a.xx * s, a.xy * s, a.yx * s, a.yy * s};
}
constexpr Vec2 operator*(const Tensor2& t, const Vec2& v) {
  return {t.xx * v.x + t.xy * v.y, t.yx * v.x + t.yy * v.y};
}

}  // namespace swarm
