#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "test_util.hpp"
#include "texplore/experiments.hpp"
#include "texplore/lti.hpp"

using namespace texplore;
using texplore::testing::randn;

namespace {

std::vector<Vec> constant_inputs(int horizon, double value, Eigen::Index nu = 1) {
  return std::vector<Vec>(horizon, Vec::Constant(nu, value));
}

MultisineDesign<double> scalar_design(int horizon, std::vector<double> freqs, std::vector<double> amps) {
  MultisineDesign<double> d;
  d.horizon = horizon;
  d.freqs = std::move(freqs);
  for (double a : amps) d.amps.push_back(Vec::Constant(1, a));
  return d;
}

}  // namespace

TEST(Multisine, ConstantAtZeroFrequency) {
  const auto u = multisine_inputs(scalar_design(5, {0.0}, {2.0}));
  ASSERT_EQ(u.size(), 5u);
  for (const auto& uk : u) EXPECT_DOUBLE_EQ(uk(0), 2.0);
}

TEST(Multisine, AlternatingAtNyquist) {
  const auto u = multisine_inputs(scalar_design(4, {0.5}, {1.0}));
  const double want[] = {1, -1, 1, -1};
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(u[k](0), want[k], 1e-12);
}

TEST(Multisine, TwoToneByHand) {
  const auto u = multisine_inputs(scalar_design(4, {0.0, 0.25}, {1.0, 1.0}));
  EXPECT_NEAR(u[1](0), 1.0, 1e-12);
  EXPECT_NEAR(u[0](0), 2.0, 1e-12);
}

TEST(Multisine, ValidatesDesign) {
  EXPECT_THROW(validate_design(scalar_design(4, {}, {})), DimensionMismatch);
  EXPECT_THROW(validate_design(scalar_design(4, {0.1, 0.1}, {1.0, 1.0})), DimensionMismatch);
  auto bad = scalar_design(4, {0.1}, {1.0});
  bad.amps.clear();
  EXPECT_THROW(validate_design(bad), DimensionMismatch);
}

TEST(Multisine, OffGridFrequencyWarns) {
  EXPECT_TRUE(validate_design(scalar_design(10, {0.1}, {1.0})).empty());
  EXPECT_EQ(validate_design(scalar_design(10, {0.123}, {1.0})).size(), 1u);
}

TEST(Simulate, ZeroSystemStaysAtZero) {
  const SystemModel<double> sys{Mat::Zero(2, 2), Mat::Zero(2, 1)};
  const auto inputs = constant_inputs(3, 1.0);
  const auto traj = simulate(sys, std::span<const Vec>(inputs));
  for (const auto& x : traj.states) EXPECT_EQ(x.norm(), 0.0);
}

TEST(Simulate, IdentityDynamicsHoldState) {
  const SystemModel<double> sys{Mat::Identity(2, 2), Mat::Zero(2, 1)};
  const auto inputs = constant_inputs(3, 1.0);
  const Vec e1 = Vec::Unit(2, 0);
  const auto traj = simulate(sys, std::span<const Vec>(inputs), disturbance::Zero{}, e1);
  ASSERT_EQ(traj.states.size(), 4u);
  for (const auto& x : traj.states) EXPECT_EQ(x, e1);
}

TEST(Simulate, PaperSystemTwoSteps) {
  const auto sys = paper_system();
  const auto inputs = constant_inputs(2, 1.0);
  const auto traj = simulate(sys, std::span<const Vec>(inputs));
  const Vec b = sys.b.col(0);
  EXPECT_LE((traj.states[1] - b).norm(), 1e-15);
  EXPECT_LE((traj.states[2] - (sys.a * b + b)).norm(), 1e-15);
}

TEST(Simulate, DimensionErrors) {
  const SystemModel<double> sys{Mat::Identity(2, 2), Mat::Zero(2, 1)};
  const auto inputs = constant_inputs(3, 1.0, 2);
  EXPECT_THROW(simulate(sys, std::span<const Vec>(inputs)), DimensionMismatch);
  const auto ok_inputs = constant_inputs(3, 1.0);
  EXPECT_THROW(simulate(sys, std::span<const Vec>(ok_inputs), disturbance::Zero{}, Vec(Vec::Zero(3))),
               DimensionMismatch);
  const disturbance::FixedSequence short_w{{Vec::Zero(2)}};
  EXPECT_THROW(simulate(sys, std::span<const Vec>(ok_inputs), short_w), DimensionMismatch);
}

TEST(Simulate, LinearInInputs) {
  std::mt19937_64 rng(21);
  const SystemModel<double> sys{0.5 * randn(rng, 3, 3) / 3.0, randn(rng, 3, 2)};
  std::vector<Vec> u1, u2, mix;
  for (int k = 0; k < 20; ++k) {
    u1.push_back(randn(rng, 2, 1));
    u2.push_back(randn(rng, 2, 1));
    mix.push_back(2.5 * u1.back() - 0.7 * u2.back());
  }
  const auto t1 = simulate(sys, std::span<const Vec>(u1));
  const auto t2 = simulate(sys, std::span<const Vec>(u2));
  const auto tm = simulate(sys, std::span<const Vec>(mix));
  for (int k = 0; k <= 20; ++k) {
    const Vec want = 2.5 * t1.states[k] - 0.7 * t2.states[k];
    EXPECT_LE((tm.states[k] - want).norm(), 1e-10 * std::max(1.0, want.norm()));
  }
}

TEST(Simulate, StateCosineUsesCurrentState) {
  const SystemModel<double> sys{Mat::Identity(2, 2), Mat::Zero(2, 1)};
  const auto inputs = constant_inputs(2, 0.0);
  Vec x0(2);
  x0 << 1.0, 3.0;
  const auto traj = simulate(sys, std::span<const Vec>(inputs), disturbance::StateCosine{0.5}, x0);
  EXPECT_DOUBLE_EQ(traj.disturbances[0](0), -0.5 * std::cos(1.0));
  EXPECT_DOUBLE_EQ(traj.disturbances[0](1), 0.0);
  EXPECT_DOUBLE_EQ(traj.disturbances[1](0), -0.5 * std::cos(traj.states[1](0)));
}

TEST(Disturbance, EnergyExamples) {
  EXPECT_EQ(disturbance_energy(std::span<const Vec>(std::vector<Vec>(3, Vec::Zero(2)))), 0.0);
  Vec w(2);
  w << 3, 4;
  const std::vector<Vec> one{w};
  EXPECT_DOUBLE_EQ(disturbance_energy(std::span<const Vec>(one)), 25.0);
}

TEST(Disturbance, PaperCosineWithinBound) {
  const auto sys = paper_system();
  std::mt19937_64 rng(22);
  std::vector<Vec> u;
  for (int k = 0; k < 100; ++k) u.push_back(3.0 * randn(rng, 1, 1));
  const auto traj = simulate(sys, std::span<const Vec>(u), disturbance::StateCosine{std::sqrt(0.1)});
  const double e = disturbance_energy(std::span<const Vec>(traj.disturbances));
  EXPECT_LE(e, 10.0);
  EXPECT_LE(e, 0.1 * 100 + 1e-12);
}

TEST(Disturbance, RandomEnergyCappedIsExactAndReproducible) {
  const disturbance::RandomEnergyCapped spec{0.3, 99};
  const auto w = random_energy_capped_sequence(spec, 50, 3);
  EXPECT_LE(disturbance_energy(std::span<const Vec>(w)), 0.3 * (1 + 1e-14));
  EXPECT_NEAR(disturbance_energy(std::span<const Vec>(w)), 0.3, 1e-12);
  const auto again = random_energy_capped_sequence(spec, 50, 3);
  for (std::size_t k = 0; k < w.size(); ++k) EXPECT_EQ(w[k], again[k]);
  // Large budgets leave the draw unscaled.
  const auto big = random_energy_capped_sequence({1e6, 99}, 50, 3);
  EXPECT_LT(disturbance_energy(std::span<const Vec>(big)), 1e6);
}

TEST(PackData, SingleStep) {
  const SystemModel<double> sys{Mat::Constant(1, 1, 0.3), Mat::Constant(1, 1, 0.5)};
  const auto inputs = constant_inputs(1, 1.0);
  const auto d = pack_data(simulate(sys, std::span<const Vec>(inputs)));
  EXPECT_EQ(d.phi(0, 0), 0.0);
  EXPECT_EQ(d.phi(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.x(0), 0.5);
}

TEST(PackData, ShapesAndFirstColumn) {
  std::mt19937_64 rng(23);
  const SystemModel<double> sys{0.2 * randn(rng, 3, 3), randn(rng, 3, 2)};
  std::vector<Vec> u;
  for (int k = 0; k < 7; ++k) u.push_back(randn(rng, 2, 1));
  const Vec x0 = randn(rng, 3, 1);
  const auto traj = simulate(sys, std::span<const Vec>(u), disturbance::Zero{}, x0);
  const auto d = pack_data(traj);
  EXPECT_EQ(d.phi.rows(), 5);
  EXPECT_EQ(d.phi.cols(), 7);
  EXPECT_EQ(d.x.size(), 21);
  Vec first(5);
  first << x0, u[0];
  EXPECT_EQ(Vec(d.phi.col(0)), first);
  EXPECT_EQ(Vec(d.x.segment(3, 3)), traj.states[2]);
}

TEST(SystemModel, ThetaRoundTrip) {
  const auto sys = paper_system();
  EXPECT_EQ(sys.theta().size(), 20);
  const auto back = SystemModel<double>::from_theta(sys.theta(), 4, 1);
  EXPECT_EQ(back.a, sys.a);
  EXPECT_EQ(back.b, sys.b);
}

TEST(TrajectoryCsv, HeaderAndFinalRow) {
  const SystemModel<double> sys{Mat::Identity(2, 2), Mat::Ones(2, 1)};
  const auto inputs = constant_inputs(2, 1.0);
  std::ostringstream os;
  write_trajectory_csv(os, simulate(sys, std::span<const Vec>(inputs)));
  EXPECT_EQ(os.str(), "k,x_1,x_2,u_1\n0,0,0,1\n1,1,1,1\n2,2,2,\n");
}
