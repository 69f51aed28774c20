#pragma once

// Finite-difference harnesses for the operator identities: commutators of the
// covariant derivatives, position, rotation generators, J and H, evaluated on
// smooth analytic test fields at points inside their support.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "hilbert.hpp"
#include "operators.hpp"

namespace qmono {

/// A smooth field with the points where identities are evaluated.
struct TestField {
  std::string description;
  AnalyticField psi;
  std::vector<Vec3> samples;
};

/// psi(x) = exp(-|x-c|^2 / (2 w^2)) (c0 + e·(x-c) c1), sampled on a
/// samples_per_axis^3 grid spanning center +- width.
inline TestField gaussian_packet(const Vec3& center, double width, const Quaternion& c0, const Quaternion& c1,
                                 int samples_per_axis = 5) {
  TestField f;
  std::ostringstream os;
  os << "gaussian center " << center << " width " << width;
  f.description = os.str();
  f.psi = [center, width, c0, c1](const Vec3& x) {
    const Vec3 d = x - center;
    const double g = std::exp(-dot(d, d) / (2.0 * width * width));
    return g * (c0 + Quaternion::pure(d) * c1);
  };
  for (int i = 0; i < samples_per_axis; ++i)
    for (int j = 0; j < samples_per_axis; ++j)
      for (int k = 0; k < samples_per_axis; ++k) {
        const double s = samples_per_axis > 1 ? 2.0 / (samples_per_axis - 1) : 0.0;
        f.samples.push_back(center + width * Vec3{-1.0 + i * s, -1.0 + j * s, -1.0 + k * s});
      }
  return f;
}

/// Random packet centered at distance [r_min, r_max] from the origin.
template <class Rng>
TestField random_packet(Rng& rng, double r_min = 1.5, double r_max = 3.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Vec3 dir{gauss(rng), gauss(rng), gauss(rng)};
  dir = dir / norm(dir);
  const double r = r_min + (r_max - r_min) * uni(rng);
  const double width = 0.3 + 0.3 * uni(rng);
  const Quaternion c0{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
  const Quaternion c1{gauss(rng), gauss(rng), gauss(rng), gauss(rng)};
  return gaussian_packet(r * dir, width, c0, c1);
}

struct CommutatorReport {
  std::string op_a;
  std::string op_b;
  std::string field;
  double max_dev = 0.0;
  double mean_dev = 0.0;
  double h = 0.0;
};

/// Deviation of lhs psi from rhs psi over the sample points.
inline CommutatorReport compare_on(const Operator& lhs, const Operator& rhs, const TestField& f, double h) {
  const AnalyticField a = lhs.apply(f.psi);
  const AnalyticField b = rhs.apply(f.psi);
  CommutatorReport r{lhs.name(), rhs.name(), f.description, 0.0, 0.0, h};
  for (const auto& x : f.samples) {
    const double d = norm(a(x) - b(x));
    r.max_dev = std::max(r.max_dev, d);
    r.mean_dev += d;
  }
  if (!f.samples.empty()) r.mean_dev /= static_cast<double>(f.samples.size());
  return r;
}

inline Operator zero_operator() {
  return Operator::multiplier("0", [](const Vec3&) { return Quaternion{}; });
}

/// -(1/2) eps_ijk x_k / |x|^3 J as a multiplier: the curvature of the connection.
inline Operator curvature_target(int i, int j) {
  return Operator::multiplier("F" + std::to_string(i + 1) + std::to_string(j + 1), [i, j](const Vec3& x) {
    const CurvatureSample k = curvature(x);
    return k.kappa[i][j] * dirq(x);
  });
}

/// [nabla_i, nabla_j] against the curvature multiplier, step h.
inline CommutatorReport commutator_check(int i, int j, const TestField& f, double h, Scheme scheme = Scheme::central) {
  const Operator lhs = commutator(covderiv(axis(i), h, scheme), covderiv(axis(j), h, scheme));
  CommutatorReport r = compare_on(lhs, curvature_target(i, j), f, h);
  r.op_a = "∇" + std::to_string(i + 1);
  r.op_b = "∇" + std::to_string(j + 1);
  return r;
}

/// [nabla_i, X_j] against delta_ij.
inline CommutatorReport position_commutator_check(int i, int j, const TestField& f, double h) {
  const Operator lhs = commutator(covderiv(axis(i), h), position(j));
  const Operator rhs = i == j ? Operator::identity() : zero_operator();
  CommutatorReport r = compare_on(lhs, rhs, f, h);
  r.op_a = "∇" + std::to_string(i + 1);
  r.op_b = "X" + std::to_string(j + 1);
  return r;
}

/// [M_i, nabla_j] against -eps_ijk nabla_k.
inline CommutatorReport rotation_commutator_check(int i, int j, const TestField& f, double h) {
  const Operator lhs = commutator(rotgen(i, h), covderiv(axis(j), h));
  std::vector<std::pair<double, Operator>> terms;
  for (int k = 0; k < 3; ++k)
    if (levi_civita(i, j, k) != 0) terms.emplace_back(-levi_civita(i, j, k), covderiv(axis(k), h));
  const Operator rhs = terms.empty() ? zero_operator() : combination("-eps∇", std::move(terms));
  CommutatorReport r = compare_on(lhs, rhs, f, h);
  r.op_a = "M" + std::to_string(i + 1);
  r.op_b = "∇" + std::to_string(j + 1);
  return r;
}

/// [M_i, X_j] against -eps_ijk X_k.
inline CommutatorReport rotation_position_check(int i, int j, const TestField& f, double h) {
  const Operator lhs = commutator(rotgen(i, h), position(j));
  std::vector<std::pair<double, Operator>> terms;
  for (int k = 0; k < 3; ++k)
    if (levi_civita(i, j, k) != 0) terms.emplace_back(-levi_civita(i, j, k), position(k));
  const Operator rhs = terms.empty() ? zero_operator() : combination("-epsX", std::move(terms));
  CommutatorReport r = compare_on(lhs, rhs, f, h);
  r.op_a = "M" + std::to_string(i + 1);
  r.op_b = "X" + std::to_string(j + 1);
  return r;
}

/// [A, J] against 0 for A built with step h.
inline CommutatorReport j_commutator_check(const Operator& a, const TestField& f, double h) {
  CommutatorReport r = compare_on(commutator(a, jop()), zero_operator(), f, h);
  r.op_a = a.name();
  r.op_b = "J";
  return r;
}

/// [H, X_i] against -(1/m) nabla_i.
inline CommutatorReport ehrenfest_operator_check(int i, double mass, const TestField& f, double h) {
  const Operator lhs = commutator(hamiltonian(mass, h), position(i));
  const Operator rhs = combination("-∇/m", {{-1.0 / mass, covderiv(axis(i), h)}});
  CommutatorReport r = compare_on(lhs, rhs, f, h);
  r.op_a = "H";
  r.op_b = "X" + std::to_string(i + 1);
  return r;
}

/// Ratio dev(h) / dev(h/2); about 4 for a second-order discretization.
template <class CheckFn>
double richardson_ratio(CheckFn&& check, double h) {
  const double coarse = check(h).max_dev;
  const double fine = check(h / 2.0).max_dev;
  return coarse / fine;
}

}  // namespace qmono
