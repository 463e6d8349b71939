#pragma once

// Iterative relaxation-and-solve design of multisine amplitudes, plus the
// Gaussian-noise baseline used for comparison.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "texplore/lmi.hpp"
#include "texplore/sdp.hpp"

namespace texplore {

enum class DesignMethod { nonstochastic, stochastic_baseline };

const char* to_string(DesignMethod method);

struct DesignSpec {
  SystemModel<double> model0;
  int horizon = 100;
  std::vector<double> freqs;
  double gamma_w = 1.0;
  Mat d_des;
  double tol = 1e-4;          // on ||candidate - solution||
  int max_outer_iters = 300;
  std::optional<Vec> candidate;  // defaults to default_candidate()
  SolverConfig solver;
};

struct BaselineOptions {
  double sigma_w2 = 0.0;  // per-component disturbance variance
  double delta = 0.05;    // credibility level 1 - delta
  // Include the disturbance-driven state covariance in the expected
  // information matrix. Without it the baseline's feasible set coincides with
  // the non-stochastic one up to scale.
  bool noise_state_excitation = true;
};

struct IterationRecord {
  double objective = 0.0;
  double candidate_distance = 0.0;
  int sdp_iterations = 0;
  int retries = 0;
};

struct DesignResult {
  DesignMethod method = DesignMethod::nonstochastic;
  std::vector<double> freqs;
  Eigen::Index nu = 1;
  Vec amps;  // coordinate i * n_u + j
  double gamma_e = 0.0;
  int outer_iterations = 0;
  std::vector<IterationRecord> history;
  bool converged = false;
};

// All-ones amplitudes scaled so that their energy equals gamma_w.
Vec default_candidate(Eigen::Index num_amps, double gamma_w);

DesignResult design_nonstochastic(const DesignSpec& spec);
DesignResult design_stochastic_baseline(const DesignSpec& spec, const BaselineOptions& opts);

// Default baseline variance: gamma_w / (T n_x), i.e. expected energy gamma_w.
double default_sigma_w2(const DesignSpec& spec);

// Upper (1 - delta) quantile of chi-squared with `dof` degrees of freedom.
double chi2_quantile(int dof, double delta);

double design_energy(const Vec& amps);
DesignResult rescale_to_energy(const DesignResult& d, double target_energy);
std::vector<double> relative_energy_profile(const Vec& amps, Eigen::Index nu = 1);

// Amplitudes at frequency i as an n_u vector.
MultisineDesign<double> to_multisine(const DesignResult& d, int horizon);

nlohmann::json design_to_json(const DesignResult& d);

}  // namespace texplore
