#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qmono/checks.hpp"
#include "qmono/operators.hpp"

using namespace qmono;

namespace {

constexpr double pi = std::numbers::pi;

LatticeField random_field(const LatticeSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  LatticeField psi(spec);
  for (auto& q : psi.values()) q = {g(rng), g(rng), g(rng), g(rng)};
  return psi;
}

const LatticeSpec grid{8, 2.0};  // h = 0.5

TestField packet_at(const Vec3& c) { return gaussian_packet(c, 0.5, {1.0, 0.3, -0.2, 0.5}, {0.2, -0.4, 0.1, 0.7}); }

}  // namespace

TEST(Operators, PositionAndJ) {
  std::mt19937_64 rng(1);
  const LatticeField phi = random_field(grid, rng), psi = random_field(grid, rng);
  const LatticeField x1psi = position(0).apply(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_EQ(x1psi[i], grid.site(i).x1 * psi[i]);
  const Operator j = jop();
  EXPECT_LE(max_abs_diff(inner(phi, j(psi)), -1.0 * inner(j(phi), psi)), 1e-12);
  EXPECT_LE(max_deviation(j(j(psi)), -1.0 * psi), 1e-14);
  EXPECT_LE(max_deviation(j.adjoint()(psi), -1.0 * j(psi)), 0.0);
}

TEST(Operators, BField) {
  EXPECT_EQ(bop(2).symbol({0, 0, 2}), Quaternion::real(0.125));
}

TEST(Operators, CanonicalShifts) {
  std::mt19937_64 rng(2);
  // Supported away from the boundary so no shift below pushes values off the lattice.
  const LatticeField psi = project(BorelSet::box({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}), random_field(grid, rng));
  const double h = grid.step();
  EXPECT_EQ(vshift({0, 0, 0})(psi), psi);
  const Vec3 a{h, -h, 0}, b{-h, h, h};
  EXPECT_EQ(vshift(a)(vshift(b)(psi)), vshift(a + b)(psi));
  EXPECT_THROW(vshift({0.3 * h, 0, 0})(psi), usage_error);

  const BorelSet delta = BorelSet::box({-1.0, -0.5, -2.0}, {0.5, 1.5, 1.0});
  const LatticeField lhs = vshift(a)(project(delta, vshift(-a)(psi)));
  // Sites shifted in from outside the box are zero on both sides.
  const LatticeField rhs = project(delta.translated(a), vshift(a)(vshift(-a)(psi)));
  EXPECT_EQ(lhs, rhs);
}

TEST(Operators, TwistedTranslations) {
  std::mt19937_64 rng(3);
  const LatticeField psi = random_field(grid, rng);
  const double h = grid.step();
  const Vec3 a{2 * h, h, 0};
  // Interior norm preserved: compare against the norm of what is shifted in.
  const LatticeField shifted = uop(a)(psi);
  EXPECT_NEAR(norm(shifted), norm(vshift(a)(psi)), 1e-12);
  const BorelSet delta = BorelSet::box({-1.0, -1.0, -1.0}, {1.0, 0.5, 2.0});
  EXPECT_EQ(uop(a)(project(delta, psi)), project(delta.translated(a), uop(a)(psi)));

  // One-parameter family along a grid line, away from the origin.
  const TestField f = packet_at({2.0, 1.0, 0.0});
  const Vec3 u{0, 0, 1};
  for (double s : {0.1, 0.35}) {
    for (double t : {0.2, -0.15}) {
      const AnalyticField lhs = uop(s * u)(uop(t * u)(f.psi));
      const AnalyticField rhs = uop((s + t) * u)(f.psi);
      for (const auto& x : f.samples) EXPECT_LE(norm(lhs(x) - rhs(x)), 1e-13);
    }
  }
}

TEST(Operators, ComposeDefect) {
  const TestField f = packet_at({1.5, -1.0, 0.5});
  const Vec3 a{0.3, 0.2, -0.1}, b{-0.2, 0.4, 0.3};
  const AnalyticField id = compose_defect(a, {0, 0, 0})(f.psi);
  for (const auto& x : f.samples) EXPECT_LE(norm(id(x) - f.psi(x)), 1e-14);
  const AnalyticField m = compose_defect(a, b)(f.psi);
  for (const auto& x : f.samples) {
    const Quaternion expected = multiplier(a, b, x) * f.psi(x);
    EXPECT_LE(norm(m(x) - expected), 1e-12) << x;
  }
}

TEST(Operators, ConnectionTerm) {
  EXPECT_LE(max_abs_diff(detail::connection({1, 0, 0}, {0, 0, 1}), -0.5 * e2), 1e-16);
}

TEST(Operators, GeneratorOfTwistedTranslations) {
  // (U(s u) psi - psi)/s -> -nabla_u psi.
  const TestField f = packet_at({2.0, 0.5, -0.5});
  const Vec3 u = Vec3{1, 2, -1} / std::sqrt(6.0);
  const AnalyticField d = covderiv(u, 1e-5)(f.psi);
  for (double s : {1e-4, 1e-5}) {
    const AnalyticField us = uop(s * u)(f.psi);
    double worst = 0.0;
    for (const auto& x : f.samples) worst = std::max(worst, norm((us(x) - f.psi(x)) / s + d(x)));
    EXPECT_LE(worst, 50 * s) << s;
  }
}

TEST(Operators, PositionCommutators) {
  const TestField f = packet_at({2.0, 0.0, 0.0});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_LE(position_commutator_check(i, j, f, 1e-3).max_dev, 1e-5) << i << j;
}

TEST(Operators, CurvatureCommutator) {
  const TestField f = packet_at({2.0, 0.0, 0.0});
  EXPECT_LE(commutator_check(0, 0, f, 1e-2).max_dev, 1e-12);
  const double ratio = richardson_ratio([&](double h) { return commutator_check(0, 1, f, h); }, 0.1);
  EXPECT_NEAR(ratio, 4.0, 0.5);
  EXPECT_LE(commutator_check(0, 1, f, 0.01).max_dev, 1e-3);
  // Target at (0,0,1), i=1, j=2: -1/2 j(x).
  EXPECT_LE(max_abs_diff(curvature_target(0, 1).symbol({0, 0, 1}), -0.5 * e3), 1e-16);
}

TEST(Operators, RotationGenerators) {
  const TestField f = packet_at({1.5, 1.0, -0.5});
  EXPECT_NEAR(richardson_ratio([&](double h) { return rotation_commutator_check(0, 1, f, h); }, 0.1), 4.0, 0.5);
  EXPECT_LE(rotation_position_check(2, 0, f, 0.01).max_dev, 1e-3);
  EXPECT_NEAR(richardson_ratio([&](double h) { return j_commutator_check(rotgen(1, h), f, h); }, 0.1), 4.0, 0.5);
}

TEST(Operators, FullTurnIsMinusOne) {
  const TestField f = packet_at({1.5, 1.0, -0.5});
  const AnalyticField r = rotation({0, 0, 1}, 2 * pi)(f.psi);
  for (const auto& x : f.samples) EXPECT_LE(norm(r(x) + f.psi(x)), 1e-12);
  // Lattice quarter turns: four of them are -1 exactly up to rounding.
  std::mt19937_64 rng(4);
  const LatticeField psi = random_field(grid, rng);
  const Operator q = rotation({0, 0, 1}, pi / 2);
  EXPECT_LE(max_deviation(q(q(q(q(psi)))), -1.0 * psi), 1e-14);
  EXPECT_THROW(rotation({0, 0, 1}, 0.3)(psi), usage_error);
}

TEST(Operators, HamiltonianIdentities) {
  const TestField f = packet_at({2.0, -1.0, 0.5});
  EXPECT_NEAR(richardson_ratio([&](double h) { return j_commutator_check(hamiltonian(1.0, h), f, h); }, 0.1), 4.0,
              0.5);
  EXPECT_NEAR(richardson_ratio([&](double h) { return ehrenfest_operator_check(0, 1.5, f, h); }, 0.1), 4.0, 0.5);
  EXPECT_THROW(hamiltonian(0.0), usage_error);
}

TEST(Operators, LatticeAdjoints) {
  std::mt19937_64 rng(5);
  const LatticeField phi = random_field(grid, rng), psi = random_field(grid, rng);
  for (Scheme s : {Scheme::central, Scheme::transported}) {
    const Operator d = covderiv({0, 1, 0}, 1e-3, s);
    EXPECT_LE(max_abs_diff(inner(phi, d(psi)), inner(d.adjoint()(phi), psi)), 1e-12);
  }
  const Operator h = hamiltonian(2.0, 1e-3, Scheme::transported);
  EXPECT_LE(max_abs_diff(inner(phi, h(psi)), inner(h(phi), psi)), 1e-11);
}

TEST(Operators, TransportedSchemeCommutesWithJ) {
  std::mt19937_64 rng(6);
  const LatticeField psi = random_field(grid, rng);
  const Operator j = jop();
  const Operator d = covderiv({1, 0, 0}, 1e-3, Scheme::transported);
  EXPECT_LE(max_deviation(d(j(psi)), j(d(psi))), 1e-13);
  const Operator h = hamiltonian(1.0, 1e-3, Scheme::transported);
  EXPECT_LE(max_deviation(h(j(psi)), j(h(psi))), 1e-12);
}
