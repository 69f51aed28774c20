#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qmono/operators.hpp"
#include "qmono/splitting.hpp"

using namespace qmono;

namespace {

const LatticeSpec grid{8, 2.0};

LatticeField random_field(const LatticeSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  LatticeField psi(spec);
  for (auto& q : psi.values()) q = {g(rng), g(rng), g(rng), g(rng)};
  return psi;
}

LatticeField slice_member(const LatticeSpec& spec, std::mt19937_64& rng) {
  return split(random_field(spec, rng), SliceSpec::standard()).psi1;
}

}  // namespace

TEST(Splitting, SliceSpecRequiresAnticommutingUnits) {
  EXPECT_THROW(SliceSpec(ImaginaryUnit::from_vector({0, 0, 1}), ImaginaryUnit::from_vector({1, 0, 1})), usage_error);
  EXPECT_NO_THROW(SliceSpec(ImaginaryUnit::from_vector({0, 1, 0}), ImaginaryUnit::from_vector({0, 0, 1})));
}

TEST(Splitting, ReconstructionAndIsometry) {
  const SliceSpec s = SliceSpec::standard();
  std::mt19937_64 rng(1);
  for (int n = 0; n < 1000; ++n) {
    const LatticeField psi = random_field(grid, rng);
    const SplitPair p = split(psi, s);
    ASSERT_LE(max_deviation(reconstruct(p, s), psi), 1e-14);
    const double lhs = real_inner(psi, psi);
    ASSERT_NEAR(lhs, real_inner(p.psi1, p.psi1) + real_inner(p.psi2, p.psi2), 1e-12 * lhs);
    if (n % 100 == 0) {
      EXPECT_LE(in_slice(p.psi1, s).relative_residual, 1e-14);
      EXPECT_LE(in_slice(p.psi2, s).relative_residual, 1e-14);
    }
  }
}

TEST(Splitting, MemberSplitsToItself) {
  const SliceSpec s = SliceSpec::standard();
  std::mt19937_64 rng(2);
  const LatticeField psi = slice_member(grid, rng);
  const SplitPair p = split(psi, s);
  EXPECT_LE(max_deviation(p.psi1, psi), 1e-15);
  EXPECT_LE(norm(p.psi2), 1e-15);
}

TEST(Splitting, ConstantFieldIsOffSlice) {
  const SliceSpec s = SliceSpec::standard();
  LatticeField one(grid);
  for (auto& q : one.values()) q = e0;
  const SliceResidual r = in_slice(one, s);
  EXPECT_FALSE(r.in_slice);
  double expected = 0.0;
  for (std::size_t i = 0; i < one.size(); ++i) expected = std::max(expected, norm(dirq(grid.site(i)) - e3));
  EXPECT_NEAR(r.max_residual, expected, 1e-15);
}

TEST(Splitting, SliceClosedUnderSliceScalars) {
  const SliceSpec s = SliceSpec::standard();
  std::mt19937_64 rng(3);
  const LatticeField psi = slice_member(grid, rng);
  EXPECT_TRUE(in_slice(rscale(psi, Quaternion{0.4, 0.0, 0.0, -1.3}), s).in_slice);
  EXPECT_FALSE(in_slice(rscale(psi, e1), s).in_slice);
}

TEST(Splitting, SliceInnerProductsAreSliceValued) {
  std::mt19937_64 rng(4);
  const LatticeField a = slice_member(grid, rng), b = slice_member(grid, rng);
  const Quaternion ip = inner(a, b);
  EXPECT_LE(std::abs(ip.q1) + std::abs(ip.q2), 1e-12 * norm(ip));
}

TEST(Splitting, ReduceCheck) {
  const SliceSpec s = SliceSpec::standard();
  const LatticeSpec spec{16, 6.0};
  std::mt19937_64 rng(5);
  std::vector<LatticeField> members;
  for (int n = 0; n < 4; ++n) members.push_back(slice_member(spec, rng));
  const double h = spec.step();
  EXPECT_TRUE(reduce_check(uop({h, -2 * h, 0}), s, members, 1e-12).passed());
  EXPECT_TRUE(reduce_check(hamiltonian(1.0, 1e-3, Scheme::transported), s, members, 1e-12).passed());
  const Report central = reduce_check(hamiltonian(1.0, 1e-3, Scheme::central), s, members, 1e-12);
  EXPECT_FALSE(central.passed());
  // e1 anticommutes with e3: order-one residual.
  const Report e1r = reduce_check(eop(0), s, members, 1e-12);
  EXPECT_FALSE(e1r.passed());
  EXPECT_GT(e1r.checks[1].max_dev, 0.5);
}

TEST(Splitting, PositionCommutesWithJ) {
  std::mt19937_64 rng(6);
  const LatticeField psi = random_field(grid, rng);
  for (int i = 0; i < 3; ++i) {
    const Operator x = position(i);
    EXPECT_LE(max_deviation(x(jop()(psi)), jop()(x(psi))), 1e-14);
  }
}
