#include <gtest/gtest.h>

#include "test_util.hpp"
#include "texplore/estimate.hpp"
#include "texplore/experiments.hpp"

using namespace texplore;
using texplore::testing::randn;

namespace {

DataRecord<double> random_record(std::mt19937_64& rng, const SystemModel<double>& sys, int horizon,
                                 double gamma_w, std::uint64_t noise_seed) {
  std::vector<Vec> u;
  for (int k = 0; k < horizon; ++k) u.push_back(randn(rng, sys.nu(), 1));
  const auto traj = simulate(sys, std::span<const Vec>(u), disturbance::RandomEnergyCapped{gamma_w, noise_seed});
  return pack_data(traj, gamma_w);
}

SystemModel<double> random_system(std::mt19937_64& rng, Eigen::Index nx, Eigen::Index nu) {
  return {0.3 * randn(rng, nx, nx) / std::sqrt(double(nx)), randn(rng, nx, nu)};
}

// SSR(theta) summed term by term from the definition.
double ssr_oracle(const DataRecord<double>& d, const Vec& theta) {
  const Eigen::Index nx = d.nx();
  double total = 0.0;
  for (Eigen::Index k = 0; k < d.horizon(); ++k) {
    const Mat reg = kron(Mat(d.phi.col(k).transpose()), Mat::Identity(nx, nx));
    total += (d.x.segment(k * nx, nx) - reg * theta).squaredNorm();
  }
  return total;
}

}  // namespace

TEST(LsEstimate, NoiseFreeRecovery) {
  std::mt19937_64 rng(31);
  const auto sys = random_system(rng, 3, 2);
  const auto d = random_record(rng, sys, 30, 0.0, 1);
  EXPECT_LE((ls_estimate(d) - sys.theta()).norm(), 1e-8 * sys.theta().norm());
}

TEST(LsEstimate, ScalarHandExample) {
  DataRecord<double> d;
  d.phi.resize(2, 2);
  d.phi << 0, 0.5, 1, 0;
  d.x.resize(2);
  d.x << 0.5, 0.25;
  const Vec theta = ls_estimate(d);
  EXPECT_NEAR(theta(0), 0.5, 1e-14);
  EXPECT_NEAR(theta(1), 0.5, 1e-14);
}

TEST(LsEstimate, DuplicatedColumnsLeaveEstimateUnchanged) {
  std::mt19937_64 rng(32);
  const auto d = random_record(rng, random_system(rng, 2, 1), 15, 0.5, 2);
  DataRecord<double> dup;
  dup.phi.resize(d.nphi(), 2 * d.horizon());
  dup.phi << d.phi, d.phi;
  dup.x.resize(2 * d.x.size());
  dup.x << d.x, d.x;
  EXPECT_LE((ls_estimate(dup) - ls_estimate(d)).norm(), 1e-10 * ls_estimate(d).norm());
}

TEST(LsEstimate, ThreeFormulasAgree) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_record(rng, random_system(rng, 3, 2), 25, 1.0, trial);
    const Vec a = ls_estimate(d), b = ls_estimate_summation(d), c = ls_estimate_compact(d);
    EXPECT_LE((a - b).norm(), 1e-8 * a.norm());
    EXPECT_LE((a - c).norm(), 1e-8 * a.norm());
  }
}

TEST(LsEstimate, RankDeficientThrows) {
  DataRecord<double> d;
  d.phi = Mat::Zero(2, 4);
  d.phi.row(1).setOnes();
  d.x = Vec::Ones(4);
  EXPECT_THROW(ls_estimate(d), RankDeficientData);
}

TEST(InfoMatrix, IdentityRegressor) {
  DataRecord<double> d;
  d.phi = Mat::Identity(3, 3);
  d.x = Vec::Zero(6);
  EXPECT_TRUE(info_matrix(d).isApprox(Mat::Identity(6, 6)));
}

TEST(InfoMatrix, HomogeneousAndSummationOracle) {
  std::mt19937_64 rng(34);
  const auto d = random_record(rng, random_system(rng, 2, 2), 12, 0.1, 3);
  auto scaled = d;
  scaled.phi *= 3.0;
  EXPECT_LE((info_matrix(scaled) - 9.0 * info_matrix(d)).norm(), 1e-10 * info_matrix(scaled).norm());
  Mat sum = Mat::Zero(8, 8);
  for (Eigen::Index k = 0; k < d.horizon(); ++k) {
    const Mat f = kron(Mat(d.phi.col(k)), Mat::Identity(2, 2));
    sum += f * f.transpose();
  }
  EXPECT_LE((info_matrix(d) - sum).norm(), 1e-10 * sum.norm());
}

TEST(FogelRadius, NoiseFreeEqualsBudget) {
  std::mt19937_64 rng(35);
  auto d = random_record(rng, random_system(rng, 2, 1), 20, 0.0, 4);
  d.gamma_w = 3.5;
  const auto e = non_falsified_set(d);
  EXPECT_NEAR(e.radius, 3.5, 1e-8);
}

TEST(FogelRadius, MatchesResidualOracle) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_record(rng, random_system(rng, 3, 1), 30, 2.0, 100 + trial);
    const auto e = non_falsified_set(d);
    const double want = d.gamma_w - ssr_oracle(d, e.center);
    EXPECT_NEAR(e.radius, want, 1e-8 * std::max(1.0, std::abs(want)));
    EXPECT_NEAR(ssr(d, e.center), ssr_oracle(d, e.center), 1e-9);
  }
}

TEST(FogelRadius, BoundaryWhenBudgetEqualsResidual) {
  std::mt19937_64 rng(37);
  auto d = random_record(rng, random_system(rng, 2, 1), 20, 1.0, 5);
  d.gamma_w = ssr(d, ls_estimate(d));
  EXPECT_NEAR(non_falsified_set(d).radius, 0.0, 1e-9);
}

TEST(FogelRadius, DependsOnData) {
  std::mt19937_64 rng(38);
  auto d = random_record(rng, random_system(rng, 2, 1), 20, 1.0, 6);
  const double g0 = non_falsified_set(d).radius;
  d.x(3) += 0.5;
  EXPECT_NE(non_falsified_set(d).radius, g0);
}

TEST(Contains, CenterAndEmptySet) {
  ParamEllipsoid e{Vec::Zero(2), Mat::Identity(2, 2), 0.0};
  EXPECT_TRUE(contains(e, Vec::Zero(2)));
  e.radius = -1e-3;
  EXPECT_FALSE(contains(e, Vec::Zero(2)));
  EXPECT_TRUE(e.empty());
}

TEST(Contains, SetEquivalentToResidualBound) {
  std::mt19937_64 rng(39);
  const auto d = random_record(rng, random_system(rng, 2, 1), 25, 1.0, 7);
  const auto e = non_falsified_set(d);
  int inside = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Vec theta = e.center + 0.05 * randn(rng, e.center.size(), 1);
    const double lhs = ssr_oracle(d, theta) - d.gamma_w;
    const double rhs = ellipsoid_form(e, theta) - e.radius;
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(1.0, std::abs(lhs)));
    inside += contains(e, theta) ? 1 : 0;
  }
  EXPECT_GT(inside, 0);
}

TEST(Contains, TrueParameterForAdmissibleRuns) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = random_system(rng, 3, 2);
    const auto d = random_record(rng, sys, 20, 0.8, 1000 + trial);
    EXPECT_TRUE(contains(non_falsified_set(d), sys.theta(), kMemberTol));
  }
}

TEST(GoalMet, Examples) {
  const Vec theta = Vec::LinSpaced(3, 1.0, 2.0);
  auto g = goal_met(theta, theta, Mat::Identity(3, 3));
  EXPECT_EQ(g.value, 0.0);
  EXPECT_TRUE(g.met);

  Vec err = Vec::Zero(20);
  err(0) = 0.0257;
  g = goal_met(err, Vec::Zero(20), Mat::Identity(20, 20));
  EXPECT_NEAR(g.value, 0.00066049, 1e-12);
  EXPECT_TRUE(g.met);

  Vec big = Vec::Zero(3);
  big(1) = 0.6;
  g = goal_met(big, Vec::Zero(3), 4.0 * Mat::Identity(3, 3));
  EXPECT_NEAR(g.value, 1.44, 1e-12);
  EXPECT_FALSE(g.met);
}

TEST(WarmStart, NoiseFreeRecoveryAndReshape) {
  std::mt19937_64 rng(41);
  const auto sys = random_system(rng, 3, 1);
  const auto d = random_record(rng, sys, 12, 0.0, 8);
  const auto est = warm_start_estimate(d);
  EXPECT_LE((est.a - sys.a).norm(), 1e-8);
  EXPECT_LE((est.b - sys.b).norm(), 1e-8);
}

TEST(EllipsoidJson, Fields) {
  const ParamEllipsoid e{Vec::Ones(2), Mat::Identity(2, 2), 0.5};
  const auto j = ellipsoid_to_json(e, 1, 1, 10);
  EXPECT_EQ(j["center"].size(), 2u);
  EXPECT_EQ(j["shape"][0].size(), 2u);
  EXPECT_EQ(j["radius"].get<double>(), 0.5);
  EXPECT_EQ(j["dims"]["n_x"].get<int>(), 1);
  EXPECT_EQ(j["dims"]["T"].get<int>(), 10);
}
