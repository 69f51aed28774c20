#pragma once

// Pointwise monopole geometry on R^3 \ {0}: the radial unit quaternion j(x), the
// field B = x / (2|x|^3), parallel transport w(a;x), fluxes through flat triangles
// and tetrahedra, the translation multiplier m(a,b;x) and the curvature forms.

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "error.hpp"
#include "quaternion.hpp"
#include "vec3.hpp"

namespace qmono {

namespace detail {

inline std::string describe(const Vec3& v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void require_off_origin(const Vec3& x, const char* where) {
  if (!(norm(x) > 0.0)) throw domain_error(std::string(where) + ": point at the monopole (origin)");
}

}  // namespace detail

/// j(x) = e·x / |x|, the radial imaginary unit.
inline Quaternion dirq(const Vec3& x) {
  detail::require_off_origin(x, "dirq");
  return Quaternion::pure(x / norm(x));
}

/// B(x) = x / (2 |x|^3).
inline Vec3 bfield(const Vec3& x) {
  detail::require_off_origin(x, "bfield");
  const double r = norm(x);
  return x / (2.0 * r * r * r);
}

/// Relative distance below which the segment x -> x+a counts as passing through the origin.
inline constexpr double kTransportMargin = 1e-9;

inline bool transport_admissible(const Vec3& a, const Vec3& x) {
  const double scale = std::max(norm(x), norm(x + a));
  if (!(scale > 0.0)) return false;
  return segment_origin_distance(x, a) > kTransportMargin * scale;
}

inline void require_transport_admissible(const Vec3& a, const Vec3& x) {
  if (!transport_admissible(a, x))
    throw domain_error("transport: segment from " + detail::describe(x) + " to " + detail::describe(x + a) +
                       " passes through the origin");
}

/// Parallel transport w(a;x) from x to x+a: the half-angle rotation quaternion
/// cos(theta/2) + j(x cross a) sin(theta/2), theta the angle between x and x+a.
/// Satisfies w j(x) w* = j(x+a) and w(ta; x+sa) w(sa; x) = w((s+t)a; x).
///
/// Evaluated as ((s + d) + e·(x cross a)) / sqrt(2 s (s + d)) with s = |x||x+a|,
/// d = x·(x+a), which equals the radicand form sqrt((1+c)/2) + j sqrt((1-c)/2)
/// without the cancellation in 1 - c at small angles.
inline Quaternion transport(const Vec3& a, const Vec3& x) {
  require_transport_admissible(a, x);
  if (a == Vec3{}) return e0;
  const Vec3 y = x + a;
  const double s = norm(x) * norm(y);
  const double d = dot(x, y);
  const double real_part = s + d;
  const Vec3 axis_part = cross(x, a);
  const double scale = 1.0 / std::sqrt(2.0 * s * real_part);
  return {real_part * scale, axis_part.x1 * scale, axis_part.x2 * scale, axis_part.x3 * scale};
}

/// The same transport written with c = (|x|^2 + a·x) / (|x||x+a|) as
/// sqrt((1+c)/2) + j(x cross a) sqrt((1-c)/2). Loses accuracy for small angles.
inline Quaternion transport_half_angle(const Vec3& a, const Vec3& x) {
  require_transport_admissible(a, x);
  const Vec3 y = x + a;
  const double c = (dot(x, x) + dot(a, x)) / (norm(x) * norm(y));
  const Vec3 n = cross(x, a);
  const double nn = norm(n);
  const double cos_half = std::sqrt(std::max(0.0, (1.0 + c) / 2.0));
  if (nn == 0.0) return Quaternion::real(cos_half);
  const double sin_half = std::sqrt(std::max(0.0, (1.0 - c) / 2.0));
  return Quaternion::real(cos_half) + Quaternion::pure(n / nn) * sin_half;
}

/// The cocycle with the sign of a·x flipped in the second radicand,
/// 1 - (|x|^2 - a·x)/(|x||x+a|). Not unitary; kept as a negative control.
inline Quaternion transport_literal(const Vec3& a, const Vec3& x) {
  require_transport_admissible(a, x);
  const double denom = norm(x) * norm(x + a);
  const double plus = 1.0 + (dot(x, x) + dot(a, x)) / denom;
  const double minus = 1.0 - (dot(x, x) - dot(a, x)) / denom;
  const Vec3 n = cross(x, a);
  const double nn = norm(n);
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Quaternion out = Quaternion::real(std::sqrt(plus) * inv_sqrt2);
  if (nn > 0.0) out += Quaternion::pure(n / nn) * (std::sqrt(minus) * inv_sqrt2);
  return out;
}

using TransportFn = Quaternion (*)(const Vec3&, const Vec3&);

struct Triangle {
  Vec3 v1;
  Vec3 v2;
  Vec3 v3;
};

/// Signed solid angle of the oriented triangle seen from the origin, in (-2pi, 2pi).
/// Positive when (v2 - v1) x (v3 - v1) points away from the origin.
inline double solid_angle(const Triangle& t) {
  const double n1 = norm(t.v1);
  const double n2 = norm(t.v2);
  const double n3 = norm(t.v3);
  if (!(n1 > 0.0 && n2 > 0.0 && n3 > 0.0)) throw domain_error("solid_angle: triangle vertex at the origin");
  const double triple = dot(t.v1, cross(t.v2, t.v3));
  const double scale = n1 * n2 * n3;
  if (std::abs(triple) <= 1e-12 * scale) {
    // Origin in the triangle's plane: flux is zero unless the origin lies on the surface.
    const Vec3 normal = cross(t.v2 - t.v1, t.v3 - t.v1);
    const double s1 = dot(normal, cross(t.v1, t.v2));
    const double s2 = dot(normal, cross(t.v2, t.v3));
    const double s3 = dot(normal, cross(t.v3, t.v1));
    const double tol = 1e-12 * dot(normal, normal) + 1e-300;
    const bool inside = (s1 >= -tol && s2 >= -tol && s3 >= -tol) || (s1 <= tol && s2 <= tol && s3 <= tol);
    if (dot(normal, normal) > 0.0 && inside)
      throw domain_error("solid_angle: origin lies on the triangle surface");
    return 0.0;
  }
  const double denom = scale + dot(t.v1, t.v2) * n3 + dot(t.v1, t.v3) * n2 + dot(t.v2, t.v3) * n1;
  return 2.0 * std::atan2(triple, denom);
}

/// Flux of B through the oriented flat triangle: half its solid angle.
inline double triflux(const Triangle& t) { return 0.5 * solid_angle(t); }

/// Outward flux of B through the closed tetrahedron with vertices
/// x, x+a, x+a+b, x+a+b+c: 2pi when it encloses the origin, 0 otherwise.
inline double tetraflux(const Vec3& x, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 p0 = x;
  const Vec3 p1 = p0 + a;
  const Vec3 p2 = p1 + b;
  const Vec3 p3 = p2 + c;
  const double volume = dot(p1 - p0, cross(p2 - p0, p3 - p0));
  if (volume == 0.0) throw domain_error("tetraflux: degenerate tetrahedron");
  std::array<Triangle, 4> faces{Triangle{p1, p2, p3}, Triangle{p0, p3, p2}, Triangle{p0, p1, p3},
                                Triangle{p0, p2, p1}};
  double total = 0.0;
  for (const auto& f : faces) total += triflux(f);
  return volume > 0.0 ? total : -total;
}

/// Composition defect of twisted translations, m(a,b;x) = w(a+b;x)* w(a;x+b) w(b;x).
inline Quaternion multiplier(const Vec3& a, const Vec3& b, const Vec3& x, TransportFn w = transport) {
  return conj(w(a + b, x)) * w(a, x + b) * w(b, x);
}

/// The triangle whose flux generates m(a,b;x): vertices x, x+b, x+a+b, in the order
/// the translation U(a)U(b) visits them.
inline Triangle multiplier_triangle(const Vec3& a, const Vec3& b, const Vec3& x) {
  return {x, x + b, x + a + b};
}

/// exp(j(x) Phi) with Phi the flux through multiplier_triangle(a, b, x).
inline Quaternion multiplier_from_flux(const Vec3& a, const Vec3& b, const Vec3& x) {
  return qexp(dirq(x) * triflux(multiplier_triangle(a, b, x)));
}

/// Curvature components at a point: kappa_ij = -1/2 eps_ijk x_k / |x|^3 and
/// omega[r]_ij = kappa_ij x_r / |x|.
struct CurvatureSample {
  Vec3 point;
  std::array<std::array<std::array<double, 3>, 3>, 3> omega{};
  std::array<std::array<double, 3>, 3> kappa{};
};

inline CurvatureSample curvature(const Vec3& x) {
  detail::require_off_origin(x, "curvature");
  CurvatureSample out;
  out.point = x;
  const double r = norm(x);
  const double r3 = r * r * r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double k = 0.0;
      for (int l = 0; l < 3; ++l) k += -0.5 * levi_civita(i, j, l) * x[l] / r3;
      out.kappa[i][j] = k;
      for (int s = 0; s < 3; ++s) out.omega[s][i][j] = k * x[s] / r;
    }
  return out;
}

enum class Orientation { outward, inward };

/// Chern integral of the monopole connection over the sphere |x| = radius.
///
/// Pulls kappa back along (theta, phi) and integrates with composite Simpson in
/// theta and the periodic trapezoid rule in phi (fourth order overall). Because the
/// curvature is kappa·J and J^2 = -1, the reported value is -\int kappa, which is
/// the total flux 2pi for the outward orientation.
inline double chern(int n_theta, int n_phi, double radius = 1.0, Orientation orientation = Orientation::outward) {
  if (n_theta < 8 || n_phi < 8) throw usage_error("chern: grid sizes must be >= 8");
  if (n_theta % 2 != 0) throw usage_error("chern: n_theta must be even (Simpson rule)");
  if (!(radius > 0.0)) throw usage_error("chern: radius must be positive");
  const double pi = std::numbers::pi;
  const double h_theta = pi / n_theta;
  const double h_phi = 2.0 * pi / n_phi;
  double total = 0.0;
  for (int it = 0; it <= n_theta; ++it) {
    const double weight = (it == 0 || it == n_theta) ? 1.0 : (it % 2 == 1 ? 4.0 : 2.0);
    const double theta = it * h_theta;
    const double st = std::sin(theta);
    const double ct = std::cos(theta);
    double ring = 0.0;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = ip * h_phi;
      const double sp = std::sin(phi);
      const double cp = std::cos(phi);
      const Vec3 x{radius * st * cp, radius * st * sp, radius * ct};
      if (!(norm(x) > 0.0)) continue;
      const Vec3 t_theta{radius * ct * cp, radius * ct * sp, -radius * st};
      const Vec3 t_phi{-radius * st * sp, radius * st * cp, 0.0};
      const CurvatureSample k = curvature(x);
      double form = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) form += k.kappa[i][j] * (t_theta[i] * t_phi[j] - t_theta[j] * t_phi[i]);
      ring += form;
    }
    total += weight * ring;
  }
  const double integral = total * (h_theta / 3.0) * h_phi;
  return orientation == Orientation::outward ? -integral : integral;
}

}  // namespace qmono
