#include "texplore/designer.hpp"

#include <cmath>
#include <functional>

#include <boost/math/distributions/chi_squared.hpp>

#include "texplore/io.hpp"

namespace texplore {
namespace {

constexpr int kMaxRetries = 5;
constexpr double kNudge = 1.5;
constexpr double kWarmStartScale = 1.05;

void validate_spec(const DesignSpec& spec) {
  spec.model0.validate();
  if (spec.freqs.empty()) throw DimensionMismatch("design: at least one frequency is required");
  if (!(spec.tol > 0.0)) throw DimensionMismatch("design: tol must be positive");
  if (spec.max_outer_iters < 1) throw DimensionMismatch("design: max_outer_iters must be positive");
  const Eigen::Index m = spec.model0.nx() * spec.model0.nphi();
  if (spec.d_des.rows() != m || spec.d_des.cols() != m) {
    throw DimensionMismatch("design: D_des must be " + std::to_string(m) + " square");
  }
  chol_upper(spec.d_des);  // throws unless SPD
}

// Warm start (gamma_e, a) just outside the candidate; strictly feasible when
// the candidate solved the previous relaxation.
Vec warm_start(const Vec& candidate) {
  Vec z(candidate.size() + 1);
  const Vec a = kWarmStartScale * candidate;
  z << 1.2 * a.norm() + 1e-3, a;
  return z;
}

using ProblemBuilder = std::function<LmiProblem(const Vec& candidate)>;

DesignResult run_outer_loop(const DesignSpec& spec, const BasisResponses& br, DesignMethod method,
                            const ProblemBuilder& build) {
  const Eigen::Index num_amps = br.num_amplitudes();
  Vec candidate = spec.candidate.value_or(default_candidate(num_amps, spec.gamma_w));
  if (candidate.size() != num_amps) {
    throw DimensionMismatch("design: candidate must have " + std::to_string(num_amps) + " entries");
  }

  DesignResult out;
  out.method = method;
  out.freqs = spec.freqs;
  out.nu = br.nu;
  for (int iter = 0; iter < spec.max_outer_iters; ++iter) {
    IterationRecord rec;
    SolveResult sol;
    while (true) {
      sol = solve(build(candidate), spec.solver, warm_start(candidate));
      rec.sdp_iterations += sol.iterations;
      if (sol.status == SolveStatus::optimal) break;
      if (sol.status == SolveStatus::iteration_limit) {
        throw SolverFailure("design: SDP hit its iteration limit at outer iteration " +
                            std::to_string(iter));
      }
      if (rec.retries == kMaxRetries) {
        throw SolverInfeasible("design: relaxation infeasible at outer iteration " +
                                   std::to_string(iter) + " after " + std::to_string(kMaxRetries) +
                                   " candidate nudges",
                               iter);
      }
      candidate *= kNudge;
      ++rec.retries;
    }
    const Vec solution = sol.z.tail(num_amps);
    rec.objective = sol.objective;
    rec.candidate_distance = (candidate - solution).norm();
    out.history.push_back(rec);
    out.amps = solution;
    out.gamma_e = sol.objective;
    out.outer_iterations = iter + 1;
    candidate = solution;
    if (rec.candidate_distance <= spec.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

const char* to_string(DesignMethod method) {
  return method == DesignMethod::nonstochastic ? "nonstochastic" : "stochastic-baseline";
}

Vec default_candidate(Eigen::Index num_amps, double gamma_w) {
  return Vec::Constant(num_amps, std::sqrt(gamma_w / static_cast<double>(num_amps)));
}

DesignResult design_nonstochastic(const DesignSpec& spec) {
  validate_spec(spec);
  const BasisResponses br = basis_responses(spec.model0, spec.freqs, spec.horizon);
  const Mat r = chol_upper(spec.d_des);
  const auto build = [&](const Vec& candidate) {
    return to_lmi_problem(br, relaxation_point(br, candidate, r), spec.gamma_w, spec.d_des);
  };
  return run_outer_loop(spec, br, DesignMethod::nonstochastic, build);
}

double default_sigma_w2(const DesignSpec& spec) {
  return spec.gamma_w / (static_cast<double>(spec.horizon) * static_cast<double>(spec.model0.nx()));
}

double chi2_quantile(int dof, double delta) {
  if (dof < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw DimensionMismatch("chi2_quantile: need dof >= 1 and delta in (0, 1)");
  }
  const boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, delta));
}

DesignResult design_stochastic_baseline(const DesignSpec& spec, const BaselineOptions& opts) {
  validate_spec(spec);
  if (!(opts.sigma_w2 > 0.0)) throw DimensionMismatch("baseline: sigma_w2 must be positive");
  const BasisResponses br = basis_responses(spec.model0, spec.freqs, spec.horizon);
  const Eigen::Index nx = spec.model0.nx();
  const Eigen::Index m = nx * spec.model0.nphi();
  const double c_delta = chi2_quantile(static_cast<int>(m), opts.delta);
  const Mat required = c_delta * opts.sigma_w2 * spec.d_des;
  Mat noise_info = Mat::Zero(m, m);
  if (opts.noise_state_excitation) {
    noise_info = opts.sigma_w2 * kron(noise_state_gram(spec.model0, spec.horizon), Mat::Identity(nx, nx));
  }
  const auto build = [&](const Vec& candidate) {
    return to_baseline_lmi_problem(br, assemble_phi_x(br, candidate).phi, noise_info, required);
  };
  return run_outer_loop(spec, br, DesignMethod::stochastic_baseline, build);
}

double design_energy(const Vec& amps) { return amps.squaredNorm(); }

DesignResult rescale_to_energy(const DesignResult& d, double target_energy) {
  const double energy = design_energy(d.amps);
  if (!(energy > 0.0)) throw ZeroDesign("rescale_to_energy: design has zero amplitudes");
  if (!(target_energy >= 0.0)) throw ZeroDesign("rescale_to_energy: target energy must be non-negative");
  const double factor = std::sqrt(target_energy / energy);
  DesignResult out = d;
  out.amps *= factor;
  out.gamma_e *= factor;
  return out;
}

std::vector<double> relative_energy_profile(const Vec& amps, Eigen::Index nu) {
  const double total = design_energy(amps);
  if (!(total > 0.0)) throw ZeroDesign("relative_energy_profile: all amplitudes are zero");
  if (nu < 1 || amps.size() % nu != 0) throw DimensionMismatch("relative_energy_profile: bad n_u");
  std::vector<double> profile;
  for (Eigen::Index i = 0; i < amps.size() / nu; ++i) {
    profile.push_back(amps.segment(i * nu, nu).squaredNorm() / total);
  }
  return profile;
}

MultisineDesign<double> to_multisine(const DesignResult& d, int horizon) {
  MultisineDesign<double> ms;
  ms.horizon = horizon;
  ms.freqs = d.freqs;
  for (std::size_t i = 0; i < d.freqs.size(); ++i) {
    ms.amps.push_back(d.amps.segment(static_cast<Eigen::Index>(i) * d.nu, d.nu));
  }
  return ms;
}

nlohmann::json design_to_json(const DesignResult& d) {
  nlohmann::json j;
  j["method"] = to_string(d.method);
  j["frequencies"] = io::to_json(d.freqs);
  j["amplitudes"] = io::to_json(d.amps);
  j["gamma_e"] = io::round12(d.gamma_e);
  j["energy"] = io::round12(design_energy(d.amps));
  j["profile"] = io::to_json(relative_energy_profile(d.amps, d.nu));
  j["iterations"] = d.outer_iterations;
  j["converged"] = d.converged;
  j["history"] = nlohmann::json::array();
  for (const auto& rec : d.history) {
    j["history"].push_back({{"objective", io::round12(rec.objective)},
                            {"candidate_distance", io::round12(rec.candidate_distance)},
                            {"sdp_iterations", rec.sdp_iterations},
                            {"retries", rec.retries}});
  }
  if (d.method == DesignMethod::stochastic_baseline) {
    j["note"] =
        "Gaussian credibility-region baseline (chi-squared scaling of the expected information "
        "matrix); an approximation of published stochastic exploration designs";
  }
  return j;
}

}  // namespace texplore
