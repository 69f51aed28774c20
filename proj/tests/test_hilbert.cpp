#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qmono/geometry.hpp"
#include "qmono/hilbert.hpp"

using namespace qmono;

namespace {

LatticeField random_field(const LatticeSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  LatticeField psi(spec);
  for (auto& q : psi.values()) q = {g(rng), g(rng), g(rng), g(rng)};
  return psi;
}

const LatticeSpec small{8, 2.0};

}  // namespace

TEST(Hilbert, LatticeAvoidsOrigin) {
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_GT(norm(small.site(i)), 0.0);
  EXPECT_THROW((LatticeSpec{7, 2.0}.validate()), usage_error);
  EXPECT_THROW((LatticeSpec{8, 0.0}.validate()), usage_error);
  EXPECT_DOUBLE_EQ(small.step(), 0.5);
  EXPECT_DOUBLE_EQ(small.coordinate(0), -1.75);
}

TEST(Hilbert, InnerProductOfFieldWithItselfIsReal) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 20; ++n) {
    const LatticeField psi = random_field(small, rng);
    const Quaternion ip = inner(psi, psi);
    EXPECT_GE(ip.q0, 0.0);
    EXPECT_LE(norm(ip.vec()), 1e-13 * ip.q0);
    EXPECT_NEAR(ip.q0, norm(psi) * norm(psi), 1e-12 * ip.q0);
  }
}

TEST(Hilbert, InnerProductScalars) {
  std::mt19937_64 rng(2);
  const LatticeField phi = random_field(small, rng), psi = random_field(small, rng);
  const Quaternion ip = inner(phi, psi);
  EXPECT_LE(max_abs_diff(inner(rscale(phi, e1), rscale(psi, e2)), (-e1) * ip * e2), 1e-12);
  EXPECT_LE(max_abs_diff(inner(psi, rscale(psi, e1)), inner(psi, psi) * e1), 1e-12);
  EXPECT_LE(max_abs_diff(inner(psi, phi), conj(ip)), 1e-12);
}

TEST(Hilbert, GaussianNorm) {
  const LatticeSpec spec{64, 6.0};
  const AnalyticField g = [](const Vec3& x) { return std::exp(-dot(x, x)) * e0; };
  const Quaternion ip = inner(g, g, spec);
  EXPECT_NEAR(ip.q0, std::pow(std::numbers::pi / 2, 1.5), 1e-6);
  EXPECT_EQ(norm(ip.vec()), 0.0);
}

TEST(Hilbert, RightScaling) {
  std::mt19937_64 rng(3);
  const LatticeField psi = random_field(small, rng);
  EXPECT_EQ(rscale(psi, e0), psi);
  const Quaternion p{0.3, -1.0, 2.0, 0.5}, q{1.5, 0.2, -0.7, 1.1};
  EXPECT_LE(max_deviation(rscale(rscale(psi, p), q), rscale(psi, p * q)), 1e-13);
}

TEST(Hilbert, SpectralProjections) {
  std::mt19937_64 rng(4);
  const LatticeField psi = random_field(small, rng);
  EXPECT_EQ(project(BorelSet::whole(small), psi), psi);
  const BorelSet d1 = BorelSet::box({-1.0, -2.0, -0.5}, {1.0, 0.5, 2.0});
  const BorelSet d2 = BorelSet::box({0.0, -1.0, -2.0}, {2.0, 2.0, 1.0});
  EXPECT_EQ(project(d1, project(d1, psi)), project(d1, psi));
  EXPECT_EQ(project(d1, project(d2, psi)), project(intersect(d1, d2), psi));
  EXPECT_EQ(project(d1, project(d2, psi)), project(d2, project(d1, psi)));
  // E(empty) = 0
  EXPECT_EQ(norm(project(BorelSet{}, psi)), 0.0);
}

TEST(Hilbert, Multipliers) {
  std::mt19937_64 rng(5);
  const LatticeField psi = random_field(small, rng);
  EXPECT_EQ(multop([](const Vec3&) { return e0; }, psi), psi);
  const PointSymbol j = [](const Vec3& x) { return dirq(x); };
  EXPECT_LE(max_deviation(multop(j, multop(j, psi)), -1.0 * psi), 1e-14);
  const BorelSet d = BorelSet::box({-1.0, -1.0, -1.0}, {0.5, 2.0, 0.0});
  EXPECT_EQ(multop(j, project(d, psi)), project(d, multop(j, psi)));
}

TEST(Hilbert, CsvRoundTrip) {
  std::mt19937_64 rng(6);
  const LatticeField psi = random_field(LatticeSpec{4, 1.5}, rng);
  std::stringstream ss;
  write_csv(ss, psi);
  EXPECT_EQ(read_csv(ss), psi);
}

TEST(Hilbert, BinaryRoundTrip) {
  std::mt19937_64 rng(7);
  const LatticeField psi = random_field(small, rng);
  std::stringstream ss;
  write_binary(ss, psi);
  EXPECT_EQ(ss.str().size(), 4u + 4u + 4u + 8u + 32u * small.size());
  EXPECT_EQ(read_binary(ss), psi);
}

TEST(Hilbert, MalformedInputIsRejected) {
  std::stringstream bad("index,q0,q1,q2,q3\n0,1,2,3,4\n");
  EXPECT_THROW(read_csv(bad), usage_error);
  std::stringstream truncated("# qmono-lattice n=4 L=1\nindex,q0,q1,q2,q3\n0,1,2,3,4\n");
  EXPECT_THROW(read_csv(truncated), usage_error);
  std::stringstream magic("XXXX");
  EXPECT_THROW(read_binary(magic), usage_error);
  EXPECT_THROW((LatticeField{small} + LatticeField{LatticeSpec{4, 2.0}}), usage_error);
}
