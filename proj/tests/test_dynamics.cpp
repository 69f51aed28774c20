#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "qmono/dynamics.hpp"

using namespace qmono;

namespace {

EvolutionConfig small_config() {
  EvolutionConfig c;
  c.lattice = {16, 6.0};
  c.mass = 1.0;
  c.dt = 0.02;
  c.steps = 20;
  c.packet = {{3.0, 0.0, 0.0}, 0.8, {0.5, 0.5, 0.0}};
  return c;
}

LatticeField random_field(const LatticeSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  LatticeField psi(spec);
  for (auto& q : psi.values()) q = {g(rng), g(rng), g(rng), g(rng)};
  return psi;
}

}  // namespace

TEST(Dynamics, PacketIsNormalizedAndInSlice) {
  const EvolutionConfig c = small_config();
  const LatticeField psi = make_packet(c.lattice, c.packet, SliceSpec::standard());
  EXPECT_NEAR(norm(psi), 1.0, 1e-14);
  EXPECT_LE(in_slice(psi, SliceSpec::standard()).relative_residual, 1e-14);
  const LinkLattice links(c.lattice);
  const Observables obs(links, c.mass);
  EXPECT_LE(norm(obs.position(psi) - c.packet.center), 0.05);
}

TEST(Dynamics, KickSetsVelocity) {
  EvolutionConfig c = preset("free");
  const LatticeField psi = make_packet(c.lattice, c.packet, SliceSpec::standard());
  const LinkLattice links(c.lattice);
  const Observables obs(links, c.mass);
  const Vec3 v = obs.velocity(psi);
  // Central differences see <sin(kh)/h>; for |psi^(k)|^2 ~ exp(-sigma^2 (k-p)^2) that is
  // sin(ph)/h exp(-h^2 / (4 sigma^2)), about 0.874 here rather than p/m = 1.
  const double h = c.lattice.step(), p = c.packet.momentum.x1, sigma = c.packet.width;
  EXPECT_NEAR(v.x1, std::sin(p * h) / h * std::exp(-h * h / (4 * sigma * sigma)) / c.mass, 0.01);
  EXPECT_NEAR(v.x2, 0.0, 0.05);
  EXPECT_NEAR(v.x3, 0.0, 1e-12);
}

TEST(Dynamics, ZeroStepIsIdentity) {
  const EvolutionConfig c = small_config();
  const Evolver ev(c.lattice, c.mass);
  const LatticeField psi = make_packet(c.lattice, c.packet, SliceSpec::standard());
  EXPECT_EQ(ev.step(psi, 0.0), psi);
}

TEST(Dynamics, StepIsUnitaryAndReversible) {
  const EvolutionConfig c = small_config();
  const Evolver ev(c.lattice, c.mass);
  std::mt19937_64 rng(1);
  const LatticeField psi = random_field(c.lattice, rng);
  const LatticeField fwd = ev.step(psi, 0.05);
  EXPECT_NEAR(norm(fwd), norm(psi), 1e-12 * norm(psi));
  EXPECT_LE(max_deviation(ev.step(fwd, -0.05), psi), 1e-8);
}

TEST(Dynamics, StepCommutesWithJ) {
  const EvolutionConfig c = small_config();
  const Evolver ev(c.lattice, c.mass);
  std::mt19937_64 rng(2);
  const LatticeField psi = random_field(c.lattice, rng);
  const LatticeField a = ev.step(ev.links().apply_j(psi), 0.05);
  const LatticeField b = ev.links().apply_j(ev.step(psi, 0.05));
  EXPECT_LE(max_deviation(a, b), 1e-10);
}

TEST(Dynamics, EvolutionPreservesNormAndSlice) {
  EvolutionConfig c = small_config();
  c.steps = 200;
  c.record_forces = false;
  const EvolutionResult r = evolve(c);
  ASSERT_EQ(r.trajectory.size(), 201u);
  for (double v : r.trajectory.norm) EXPECT_NEAR(v, r.trajectory.norm.front(), 1e-10);
  EXPECT_LE(in_slice(r.final_state, SliceSpec::standard()).relative_residual, 1e-8);
  EXPECT_LE(r.max_solver_iterations, 50);
}

TEST(Dynamics, EnergyIsConserved) {
  EvolutionConfig c = small_config();
  c.record_forces = false;
  const Trajectory t = evolve(c).trajectory;
  for (double e : t.energy) EXPECT_NEAR(e, t.energy.front(), 1e-10 * std::abs(t.energy.front()));
}

TEST(Dynamics, StaticPacketDoesNotMoveSideways) {
  EvolutionConfig c = preset("static");
  c.lattice = {16, 6.0};
  c.steps = 20;
  const Trajectory t = evolve(c).trajectory;
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_LE(std::abs(t.velocity[k].x2), 1e-12);
    EXPECT_LE(std::abs(t.velocity[k].x3), 1e-12);
    EXPECT_LE(norm(t.position[k] - t.position.front()), 1e-3);
  }
}

TEST(Dynamics, CommutatorForceOrderVanishes) {
  EvolutionConfig c = small_config();
  c.steps = 2;
  const Trajectory t = evolve(c).trajectory;
  ASSERT_EQ(t.force.size(), 3u);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_GT(norm(t.force[k]), 1e-3);
    EXPECT_LE(norm(t.force_commutator_order[k]), 1e-12 * norm(t.force[k]));
  }
}

TEST(Dynamics, EhrenfestReport) {
  EvolutionConfig c = small_config();
  c.steps = 40;
  const Report r = ehrenfest(evolve(c).trajectory);
  ASSERT_EQ(r.checks.size(), 3u);
  EXPECT_EQ(r.checks[2].name, "norm conservation");
  EXPECT_TRUE(r.checks[2].pass);
  // Velocity relation holds to finite-difference accuracy in time.
  EXPECT_LE(r.checks[0].max_dev, 0.01);

  Trajectory one;
  one.time = {0.0};
  one.norm = {1.0};
  const Report single = ehrenfest(one);
  ASSERT_EQ(single.checks.size(), 1u);
  EXPECT_TRUE(single.passed());
}

TEST(Dynamics, ZeroStepsGiveSingleCsvRow) {
  EvolutionConfig c = small_config();
  c.steps = 0;
  std::ostringstream os;
  write_csv(os, evolve(c).trajectory);
  const std::string csv = os.str();
  EXPECT_EQ(csv.rfind("t,x1,x2,x3,v1,v2,v3,norm,energy\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Dynamics, ConfigValidation) {
  EvolutionConfig c = small_config();
  c.mass = 0.0;
  EXPECT_THROW(c.validate(), usage_error);
  c = small_config();
  c.packet.center = {1.0, 0.0, 0.0};
  EXPECT_THROW(c.validate(), usage_error);
  c = small_config();
  c.packet.center = {5.0, 0.0, 0.0};
  EXPECT_THROW(c.validate(), usage_error);
  c = small_config();
  c.steps = -1;
  EXPECT_THROW(c.validate(), usage_error);
  EXPECT_THROW(preset("orbit"), usage_error);
  for (const char* name : {"free", "static", "flyby"}) EXPECT_NO_THROW(preset(name).validate());
}

TEST(Dynamics, SolverFailureIsReported) {
  const EvolutionConfig c = small_config();
  const Evolver ev(c.lattice, c.mass, 1e-30, 1);
  std::mt19937_64 rng(3);
  EXPECT_THROW(ev.step(random_field(c.lattice, rng), 0.5), solver_error);
}
