#include "texplore/experiments.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "texplore/io.hpp"

namespace texplore {
namespace {

constexpr double kPaperOffset = 5e-3;

Mat random_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Spectral norm scaled to rho < 1, hence Schur stable.
SystemModel<double> random_stable_system(std::mt19937_64& rng, Eigen::Index nx, Eigen::Index nu) {
  Mat a = random_normal(rng, nx, nx);
  const double norm = Eigen::JacobiSVD<Mat>(a).singularValues()(0);
  a *= uniform(rng, 0.3, 0.95) / std::max(norm, 1e-12);
  return {a, random_normal(rng, nx, nu)};
}

struct RandomTrial {
  SystemModel<double> sys;
  DataRecord<double> data;
};

RandomTrial random_trial(std::mt19937_64& rng, int max_nx, int max_nu, int max_horizon) {
  const Eigen::Index nx = uniform_int(rng, 1, max_nx);
  const Eigen::Index nu = uniform_int(rng, 1, max_nu);
  RandomTrial t;
  t.sys = random_stable_system(rng, nx, nu);
  const int nphi = static_cast<int>(nx + nu);
  const int horizon = uniform_int(rng, nphi + 2, std::max(nphi + 2, max_horizon));
  const double input_scale = uniform(rng, 0.5, 3.0);
  const Mat u = input_scale * random_normal(rng, nu, horizon);
  std::vector<Vec> inputs;
  for (int k = 0; k < horizon; ++k) inputs.emplace_back(u.col(k));
  const double gamma_w = uniform(rng, 0.01, 5.0);
  const disturbance::RandomEnergyCapped noise{gamma_w, rng()};
  const Vec x0 = random_normal(rng, nx, 1);
  const auto traj = simulate(t.sys, std::span<const Vec>(inputs), noise, x0);
  t.data = pack_data(traj, gamma_w);
  return t;
}

}  // namespace

SystemModel<double> paper_system() {
  Mat a = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    a(i, i) = 0.49;
    if (i + 1 < 4) a(i, i + 1) = 0.49;
  }
  Mat b = Mat::Zero(4, 1);
  b(3, 0) = 0.49;
  return {a, b};
}

SystemModel<double> offset_model(const SystemModel<double>& sys, double offset) {
  const Vec theta = sys.theta().array() + offset;
  return SystemModel<double>::from_theta(theta, sys.nx(), sys.nu());
}

ExperimentSetup paper_setup() {
  ExperimentSetup s;
  s.true_system = paper_system();
  s.design.model0 = offset_model(s.true_system, kPaperOffset);
  s.design.horizon = 100;
  s.design.freqs = {0.0, 0.1, 0.2, 0.3, 0.4};
  s.design.gamma_w = 10.0;
  s.design.d_des = Mat::Identity(20, 20);
  s.disturbance = disturbance::StateCosine{std::sqrt(0.1)};
  s.baseline.sigma_w2 = default_sigma_w2(s.design);
  return s;
}

ExplorationOutcome run_exploration(const ExperimentSetup& setup, const DesignResult& design) {
  const int horizon = setup.design.horizon;
  const auto inputs = multisine_inputs(to_multisine(design, horizon));
  ExplorationOutcome out;
  out.warnings = validate_design(to_multisine(design, horizon));
  out.trajectory = simulate(setup.true_system, std::span<const Vec>(inputs), setup.disturbance);
  const DataRecord<double> data = pack_data(out.trajectory, setup.design.gamma_w);
  out.ellipsoid = non_falsified_set(data);

  ExperimentReport& r = out.report;
  r.method = to_string(design.method);
  r.design_energy = design_energy(design.amps);
  r.disturbance_energy = disturbance_energy(std::span<const Vec>(out.trajectory.disturbances));
  const Vec theta_tr = setup.true_system.theta();
  r.error_norm = (theta_tr - out.ellipsoid.center).norm();
  const GoalCheck goal = goal_met(out.ellipsoid.center, theta_tr, setup.design.d_des, kMemberTol);
  r.goal_form = goal.value;
  r.goal_met = goal.met;
  r.fogel_radius = out.ellipsoid.radius;
  r.theorem1_min_eig = min_eig(theorem1_matrix(data, setup.design.d_des));
  r.theorem1_psd = r.theorem1_min_eig >= -kTheorem1PsdTol;
  r.outer_iterations = design.outer_iterations;
  r.converged = design.converged;

  if (r.disturbance_energy > setup.design.gamma_w) {
    out.warnings.push_back("realized disturbance energy " + io::fmt12(r.disturbance_energy) +
                           " exceeds gamma_w " + io::fmt12(setup.design.gamma_w));
  }
  if (out.ellipsoid.empty()) {
    out.warnings.push_back("negative Fogel radius G = " + io::fmt12(out.ellipsoid.radius) +
                           ": the data falsify every parameter under the declared energy bound");
  }
  return out;
}

ComparisonResult run_comparison(const ExperimentSetup& setup) {
  ComparisonResult c;
  c.nonstochastic = design_nonstochastic(setup.design);
  BaselineOptions opts = setup.baseline;
  if (!(opts.sigma_w2 > 0.0)) opts.sigma_w2 = default_sigma_w2(setup.design);
  const DesignResult raw = design_stochastic_baseline(setup.design, opts);
  c.baseline = rescale_to_energy(raw, design_energy(c.nonstochastic.amps));
  c.nonstochastic_run = run_exploration(setup, c.nonstochastic);
  c.baseline_run = run_exploration(setup, c.baseline);
  return c;
}

VerifySummary verify_lemma1(int trials, std::uint64_t seed) {
  VerifySummary s;
  s.trials = trials;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    const RandomTrial t = random_trial(rng, 4, 2, 60);
    ParamEllipsoid e;
    try {
      e = non_falsified_set(t.data);
    } catch (const RankDeficientData&) {
      ++s.skipped;
      continue;
    }
    ++s.applicable;
    if (contains(e, t.sys.theta(), kMemberTol)) {
      ++s.passed;
    } else {
      s.failures.push_back(i);
    }
  }
  return s;
}

VerifySummary verify_theorem1(int trials, std::uint64_t seed) {
  VerifySummary s;
  s.trials = trials;
  s.seed = seed;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    const RandomTrial t = random_trial(rng, 3, 2, 30);
    const Eigen::Index m = t.sys.nx() * t.sys.nphi();
    ParamEllipsoid e;
    try {
      e = non_falsified_set(t.data);
    } catch (const RankDeficientData&) {
      ++s.skipped;
      continue;
    }
    // D = f s* M where s* puts P^{-1} >= G D on its boundary; f straddles 1.
    const Mat r = random_normal(rng, m, m);
    Mat shape = r * r.transpose() / static_cast<double>(m) + 0.1 * Mat::Identity(m, m);
    const Mat l_inv = chol_upper(shape).transpose().triangularView<Eigen::Lower>().solve(Mat::Identity(m, m));
    const double lam = min_eig(symmetrize(l_inv * e.shape * l_inv.transpose()));
    const double g = std::max(e.radius, 1e-12);
    const double factor = uniform(rng, 0.5, 1.5);
    const Mat d_des = symmetrize(Mat(factor * lam / g * shape));

    const double lowest = min_eig(theorem1_matrix(t.data, d_des));
    if (lowest < -kTheorem1PsdTol) continue;
    ++s.applicable;
    if (goal_met(e.center, t.sys.theta(), d_des, kGoalTol).met) {
      ++s.passed;
    } else {
      s.failures.push_back(i);
    }
  }
  return s;
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  return {{"method", r.method},
          {"design_energy", io::round12(r.design_energy)},
          {"disturbance_energy", io::round12(r.disturbance_energy)},
          {"error_norm", io::round12(r.error_norm)},
          {"goal_quadform", io::round12(r.goal_form)},
          {"goal_met", r.goal_met},
          {"fogel_radius", io::round12(r.fogel_radius)},
          {"theorem1_min_eig", io::round12(r.theorem1_min_eig)},
          {"theorem1_psd", r.theorem1_psd},
          {"outer_iterations", r.outer_iterations},
          {"converged", r.converged}};
}

nlohmann::json verify_to_json(const VerifySummary& s) {
  return {{"trials", s.trials},     {"applicable", s.applicable}, {"passed", s.passed},
          {"skipped", s.skipped},   {"seed", s.seed},             {"failures", s.failures},
          {"ok", s.ok()}};
}

void write_profile_csv(std::ostream& os, const DesignResult& ns, const DesignResult& baseline) {
  if (ns.freqs != baseline.freqs) throw DimensionMismatch("profile csv: designs use different frequencies");
  const auto p_ns = relative_energy_profile(ns.amps, ns.nu);
  const auto p_bl = relative_energy_profile(baseline.amps, baseline.nu);
  os << "omega,rel_energy_nonstochastic,rel_energy_stochastic\n";
  for (std::size_t i = 0; i < ns.freqs.size(); ++i) {
    os << io::fmt12(ns.freqs[i]) << ',' << io::fmt12(p_ns[i]) << ',' << io::fmt12(p_bl[i]) << '\n';
  }
}

void write_profile_csv(std::ostream& os, const DesignResult& d) {
  const auto p = relative_energy_profile(d.amps, d.nu);
  os << "omega,rel_energy_" << (d.method == DesignMethod::nonstochastic ? "nonstochastic" : "stochastic")
     << '\n';
  for (std::size_t i = 0; i < d.freqs.size(); ++i) {
    os << io::fmt12(d.freqs[i]) << ',' << io::fmt12(p[i]) << '\n';
  }
}

void write_table_csv(std::ostream& os, const std::vector<ExperimentReport>& reports) {
  os << "method,error,goal_quadform,goal_met\n";
  for (const auto& r : reports) {
    os << r.method << ',' << io::fmt12(r.error_norm) << ',' << io::fmt12(r.goal_form) << ','
       << (r.goal_met ? "true" : "false") << '\n';
  }
}

nlohmann::json comparison_to_json(const ComparisonResult& c) {
  nlohmann::json j;
  j["nonstochastic"] = {{"design", design_to_json(c.nonstochastic)},
                        {"report", report_to_json(c.nonstochastic_run.report)},
                        {"warnings", c.nonstochastic_run.warnings}};
  j["stochastic"] = {{"design", design_to_json(c.baseline)},
                     {"report", report_to_json(c.baseline_run.report)},
                     {"warnings", c.baseline_run.warnings}};
  j["equal_energy"] = io::round12(design_energy(c.nonstochastic.amps));
  return j;
}

}  // namespace texplore
