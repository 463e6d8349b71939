#pragma once

// Matrix inequalities for the exploration design: the input-energy bound, the
// data condition guaranteeing the accuracy goal (and its Schur form), the
// convex relaxation that makes it linear in the amplitudes, and assembly of
// the resulting LMI problem.
//
// Sizes used throughout: m = n_x n_phi (parameter count); the large block has
// dimension m + m^2; Y-type matrices are (m + m^2) x (T n_x m).

#include <vector>

#include "json.hpp"

#include "texplore/lti.hpp"

namespace texplore {

// Noise-free responses of the initial model to unit cosines. Coordinate
// c = i * n_u + j is frequency i driven through input channel j.
struct BasisResponses {
  int horizon = 0;
  Eigen::Index nx = 0;
  Eigen::Index nu = 0;
  std::vector<double> freqs;
  std::vector<Mat> phi;  // n_phi x T each
  std::vector<Vec> x;    // T n_x each

  Eigen::Index num_amplitudes() const { return static_cast<Eigen::Index>(phi.size()); }
  Eigen::Index nphi() const { return nx + nu; }
};

BasisResponses basis_responses(const SystemModel<double>& model0, const std::vector<double>& freqs,
                               int horizon);

struct PhiX {
  Mat phi;
  Vec x;
};

// Phi(U) = sum_c Phi^(c) a_c, X(U) = sum_c X^(c) a_c.
PhiX assemble_phi_x(const BasisResponses& br, const Vec& amps);

// [R^T (X^T kron I_m); (Phi kron I_nx) kron I_m] with R = D^{1/2} upper triangular.
Mat build_y(const Vec& x_hat, const Mat& phi_hat, const Mat& d_des_half);

// [g, a^T; a, g I].
Mat s_energy(double gamma_e, const Vec& amps);

// blkdiag((Phi Phi^T) kron I - gamma_w D, 0) + Y Y^T, with Y materialized.
Mat theorem1_matrix(const Mat& phi, const Vec& x, const Mat& d_des, double gamma_w);
Mat theorem1_matrix(const DataRecord<double>& d, const Mat& d_des);

// The same condition assembled block by block in closed form.
Mat schur_form_matrix(const Mat& phi, const Vec& x, const Mat& d_des, double gamma_w);
Mat schur_form_matrix(const DataRecord<double>& d, const Mat& d_des);

// (Phi Phi^T) kron I - (gamma_w - X^T X + X^T ((Phi^T (Phi Phi^T)^{-1} Phi) kron I) X) D.
// Requires Phi Phi^T invertible.
Mat pe_inequality_matrix(const Mat& phi, const Vec& x, const Mat& d_des, double gamma_w);

struct RelaxationPoint {
  Mat l1;       // n_phi x T
  Mat l2;       // (m + m^2) x (T n_x m)
  Vec x_tilde;  // candidate successor states, kept for structured assembly
};

// L1 = Phi~, L2 = [R^T (X~^T kron I_m); (Phi~ kron I_nx) kron I_m].
RelaxationPoint relaxation_point(const BasisResponses& br, const Vec& candidate,
                                 const Mat& d_des_half);

// Relaxed condition from dense (Phi, Y, L1, L2).
Mat s_exploration(const Mat& phi_hat, const Mat& y_hat, const RelaxationPoint& rp, double gamma_w,
                  const Mat& d_des);

// Relaxed condition evaluated from (Phi, X) and the candidate (Phi~, X~)
// without forming any of the T-wide Kronecker factors.
Mat s_exploration_structured(const Mat& phi, const Vec& x, const Mat& phi_tilde, const Vec& x_tilde,
                             double gamma_w, const Mat& d_des, const Mat& d_des_half);

// Affine symmetric block F_0 + sum_i z_i F_i.
struct LmiBlock {
  std::vector<Mat> coeffs;  // F_0 .. F_m

  Eigen::Index dim() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
  Mat evaluate(const Vec& z) const;
};

// minimize objective^T z subject to every block being PSD.
struct LmiProblem {
  Vec objective;
  std::vector<LmiBlock> blocks;

  Eigen::Index num_vars() const { return objective.size(); }
  void validate() const;
};

// Variables z = (gamma_e, a_1 .. a_{L n_u}); blocks = {energy, exploration}.
LmiProblem to_lmi_problem(const BasisResponses& br, const RelaxationPoint& rp, double gamma_w,
                          const Mat& d_des);

// sum_{k<T} Cov(e_k) for e_{k+1} = A0 e_k + w_k, w ~ N(0, I), embedded in the
// n_phi x n_phi regressor block (zeros for the inputs).
Mat noise_state_gram(const SystemModel<double>& model0, int horizon);

// Variables as to_lmi_problem; second block is
// Q(a) kron I + noise_info - required, with Q the relaxed Phi Phi^T around l1.
LmiProblem to_baseline_lmi_problem(const BasisResponses& br, const Mat& l1, const Mat& noise_info,
                                   const Mat& required);

nlohmann::json lmi_to_json(const LmiProblem& p);
LmiProblem lmi_from_json(const nlohmann::json& j);

}  // namespace texplore
