#pragma once

// Real quaternions H = span{e0, e1, e2, e3} with e_i e_j = -delta_ij e0 + eps_ijk e_k,
// the SU(2) matrix picture e_k = -i sigma_k, inner automorphisms and complex slices.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <ostream>

#include "error.hpp"
#include "vec3.hpp"

namespace qmono {

struct Quaternion {
  double q0 = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;

  static constexpr Quaternion real(double r) { return {r, 0.0, 0.0, 0.0}; }
  /// Pure quaternion e·v.
  static constexpr Quaternion pure(const Vec3& v) { return {0.0, v.x1, v.x2, v.x3}; }

  constexpr double operator[](int mu) const {
    switch (mu) {
      case 0: return q0;
      case 1: return q1;
      case 2: return q2;
      default: return q3;
    }
  }

  constexpr Vec3 vec() const { return {q1, q2, q3}; }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    q0 += o.q0; q1 += o.q1; q2 += o.q2; q3 += o.q3;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    q0 -= o.q0; q1 -= o.q1; q2 -= o.q2; q3 -= o.q3;
    return *this;
  }

  friend constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
  friend constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
  friend constexpr Quaternion operator-(const Quaternion& a) { return {-a.q0, -a.q1, -a.q2, -a.q3}; }
  // Real scalars are central, so left and right real scaling agree.
  friend constexpr Quaternion operator*(double s, const Quaternion& a) {
    return {s * a.q0, s * a.q1, s * a.q2, s * a.q3};
  }
  friend constexpr Quaternion operator*(const Quaternion& a, double s) { return s * a; }
  friend constexpr Quaternion operator/(const Quaternion& a, double s) {
    return {a.q0 / s, a.q1 / s, a.q2 / s, a.q3 / s};
  }
  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << '(' << q.q0 << ", " << q.q1 << ", " << q.q2 << ", " << q.q3 << ')';
  }
};

inline constexpr Quaternion e0{1.0, 0.0, 0.0, 0.0};
inline constexpr Quaternion e1{0.0, 1.0, 0.0, 0.0};
inline constexpr Quaternion e2{0.0, 0.0, 1.0, 0.0};
inline constexpr Quaternion e3{0.0, 0.0, 0.0, 1.0};

/// Basis element e_mu, mu in 0..3.
constexpr Quaternion basis(int mu) {
  switch (mu) {
    case 0: return e0;
    case 1: return e1;
    case 2: return e2;
    default: return e3;
  }
}

/// Hamilton product.
constexpr Quaternion mul(const Quaternion& p, const Quaternion& q) {
  return {p.q0 * q.q0 - p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3,
          p.q0 * q.q1 + p.q1 * q.q0 + p.q2 * q.q3 - p.q3 * q.q2,
          p.q0 * q.q2 - p.q1 * q.q3 + p.q2 * q.q0 + p.q3 * q.q1,
          p.q0 * q.q3 + p.q1 * q.q2 - p.q2 * q.q1 + p.q3 * q.q0};
}

constexpr Quaternion operator*(const Quaternion& p, const Quaternion& q) { return mul(p, q); }

constexpr Quaternion conj(const Quaternion& q) { return {q.q0, -q.q1, -q.q2, -q.q3}; }

constexpr double norm2(const Quaternion& q) {
  return q.q0 * q.q0 + q.q1 * q.q1 + q.q2 * q.q2 + q.q3 * q.q3;
}

inline double norm(const Quaternion& q) { return std::sqrt(norm2(q)); }

/// Largest absolute component difference.
inline double max_abs_diff(const Quaternion& a, const Quaternion& b) {
  return std::max({std::abs(a.q0 - b.q0), std::abs(a.q1 - b.q1), std::abs(a.q2 - b.q2),
                   std::abs(a.q3 - b.q3)});
}

/// exp(r + v) = e^r (cos|v| + v/|v| sin|v|).
inline Quaternion qexp(const Quaternion& q) {
  const double angle = norm(q.vec());
  // sin(t)/t; the series keeps the v -> 0 limit finite.
  const double sinc = angle < 1e-6 ? 1.0 - angle * angle / 6.0 : std::sin(angle) / angle;
  const double scale = std::exp(q.q0);
  return {scale * std::cos(angle), scale * sinc * q.q1, scale * sinc * q.q2, scale * sinc * q.q3};
}

/// A pure unit quaternion: omega* = -omega, omega* omega = e0.
class ImaginaryUnit {
 public:
  /// Normalizes v; rejects directions shorter than 1e-12.
  static ImaginaryUnit from_vector(const Vec3& v) {
    const double n = norm(v);
    if (!(n >= 1e-12)) throw domain_error("ImaginaryUnit: direction has norm < 1e-12");
    return ImaginaryUnit(Quaternion::pure(v / n));
  }

  /// Accepts a pure quaternion (|q0| <= 1e-12 |q|) and normalizes it.
  static ImaginaryUnit from_quaternion(const Quaternion& q) {
    const double n = norm(q);
    if (!(n >= 1e-12)) throw domain_error("ImaginaryUnit: quaternion has norm < 1e-12");
    if (std::abs(q.q0) > 1e-12 * n) throw domain_error("ImaginaryUnit: quaternion is not pure imaginary");
    return from_vector(q.vec());
  }

  constexpr const Quaternion& value() const { return unit_; }
  constexpr operator const Quaternion&() const { return unit_; }  // NOLINT(google-explicit-constructor)
  constexpr Vec3 direction() const { return unit_.vec(); }

 private:
  explicit constexpr ImaginaryUnit(const Quaternion& q) : unit_(q) {}
  Quaternion unit_;
};

/// 2x2 complex matrix, row-major {a, b; c, d}.
struct Mat2C {
  std::array<std::complex<double>, 4> m{};

  constexpr const std::complex<double>& operator()(int r, int c) const { return m[2 * r + c]; }
  constexpr std::complex<double>& operator()(int r, int c) { return m[2 * r + c]; }

  friend Mat2C operator*(const Mat2C& a, const Mat2C& b) {
    Mat2C out;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) out(r, c) = a(r, 0) * b(0, c) + a(r, 1) * b(1, c);
    return out;
  }

  std::complex<double> det() const { return m[0] * m[3] - m[1] * m[2]; }

  Mat2C adjoint() const {
    Mat2C out;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) out(r, c) = std::conj((*this)(c, r));
    return out;
  }

  static Mat2C identity() {
    Mat2C out;
    out(0, 0) = 1.0;
    out(1, 1) = 1.0;
    return out;
  }

  double max_abs_diff(const Mat2C& o) const {
    double d = 0.0;
    for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(m[k] - o.m[k]));
    return d;
  }
};

/// Real-linear embedding e0 -> I, e_k -> -i sigma_k.
inline Mat2C su2(const Quaternion& q) {
  using C = std::complex<double>;
  Mat2C out;
  out(0, 0) = C(q.q0, -q.q3);
  out(0, 1) = C(-q.q2, -q.q1);
  out(1, 0) = C(q.q2, -q.q1);
  out(1, 1) = C(q.q0, q.q3);
  return out;
}

/// alpha_omega(q) = omega* q omega. Requires |omega| = 1 (to 1e-12).
inline Quaternion automorphism(const Quaternion& omega, const Quaternion& q) {
  if (std::abs(norm(omega) - 1.0) > 1e-12) throw usage_error("automorphism: omega must be a unit quaternion");
  return conj(omega) * q * omega;
}

/// True when q lies in C_omega = {u + v omega}.
inline bool in_complex_slice(const Quaternion& q, const ImaginaryUnit& omega, double tol = 1e-12) {
  const Vec3 v = q.vec();
  return norm(cross(v, omega.direction())) <= tol * std::max(1.0, norm(q));
}

}  // namespace qmono
