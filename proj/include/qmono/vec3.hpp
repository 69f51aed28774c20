#pragma once

#include <array>
#include <cmath>
#include <ostream>

namespace qmono {

struct Vec3 {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
  constexpr double& operator[](int i) { return i == 0 ? x1 : (i == 1 ? x2 : x3); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x1 += o.x1; x2 += o.x2; x3 += o.x3;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x1 -= o.x1; x2 -= o.x2; x3 -= o.x3;
    return *this;
  }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x1, -a.x2, -a.x3}; }
  friend constexpr Vec3 operator*(double s, const Vec3& a) { return {s * a.x1, s * a.x2, s * a.x3}; }
  friend constexpr Vec3 operator*(const Vec3& a, double s) { return s * a; }
  friend constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x1 / s, a.x2 / s, a.x3 / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << '(' << v.x1 << ", " << v.x2 << ", " << v.x3 << ')';
  }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.x2 * b.x3 - a.x3 * b.x2, a.x3 * b.x1 - a.x1 * b.x3, a.x1 * b.x2 - a.x2 * b.x1};
}

inline double norm(const Vec3& a) { return std::hypot(a.x1, a.x2, a.x3); }

/// Unit vector along axis i (0-based).
constexpr Vec3 axis(int i) {
  Vec3 v;
  v[i] = 1.0;
  return v;
}

/// Levi-Civita symbol on 0-based indices.
constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

/// Distance from the origin to the closed segment [p, p + d].
inline double segment_origin_distance(const Vec3& p, const Vec3& d) {
  const double dd = dot(d, d);
  if (dd == 0.0) return norm(p);
  double t = -dot(p, d) / dd;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return norm(p + t * d);
}

}  // namespace qmono
