#pragma once

// Small-variable SDP solver: minimize c^T z subject to F_0 + sum_i z_i F_i >= 0
// for every block. Primal log-det barrier with a phase-I feasibility search.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "texplore/lmi.hpp"

namespace texplore {

struct SolverConfig {
  double eig_tol = 1e-7;        // accepted negative slack in returned certificates
  double feas_tol = 1e-8;       // blocks are relaxed by feas_tol * I while solving
  double objective_tol = 1e-6;  // relative duality-gap bound at termination
  int max_iters = 5000;         // Newton steps over both phases
  std::string strategy = "barrier";
};

enum class SolveStatus { optimal, infeasible, iteration_limit };

const char* to_string(SolveStatus status);

// v^T F(z) v < 0 at the best point found by the feasibility phase.
struct InfeasibilityCertificate {
  int block = -1;
  Vec direction;
  double value = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::iteration_limit;
  Vec z;
  double objective = 0.0;
  std::vector<double> certificates;  // min eigenvalue of every block at z
  int iterations = 0;
  std::string strategy = "barrier";
  std::optional<InfeasibilityCertificate> infeasibility;
};

// `start` is an optional initial point; it need not be feasible.
SolveResult solve(const LmiProblem& p, const SolverConfig& cfg = {},
                  const std::optional<Vec>& start = std::nullopt);

std::vector<double> check_feasible(const LmiProblem& p, const Vec& z);

nlohmann::json solve_result_to_json(const SolveResult& r);

}  // namespace texplore
