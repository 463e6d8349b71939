#pragma once

// Least-squares estimation and the set of parameters consistent with
// energy-bounded disturbances:
//   Theta = { theta : (theta - c)^T P^{-1} (theta - c) <= G }.

#include <string>

#include "json.hpp"

#include "texplore/lti.hpp"

namespace texplore {

struct ParamEllipsoid {
  Vec center;     // theta_hat
  Mat shape;      // P^{-1} = (Phi Phi^T) kron I
  double radius;  // G; negative means the set is empty

  bool empty() const { return radius < 0.0; }
};

// Default slack for contains(): q <= G + tol * max(1, |G|).
inline constexpr double kMemberTol = 1e-8;

// Phi Phi^T, checked against tol_rank = 1e-10 trace / n_phi.
Mat regressor_gram(const DataRecord<double>& d);

// Least-squares estimate via one Cholesky solve of Phi Phi^T per state row.
Vec ls_estimate(const DataRecord<double>& d);

// theta = P sum_k (phi_k^T kron I)^T x_{k+1}, accumulated term by term.
Vec ls_estimate_summation(const DataRecord<double>& d);

// theta = P (Phi kron I) X with P formed explicitly.
Vec ls_estimate_compact(const DataRecord<double>& d);

Mat info_matrix(const DataRecord<double>& d);

// Sum of squared one-step residuals at theta.
double ssr(const DataRecord<double>& d, const Vec& theta);

// G = gamma_w + ||theta_hat||^2_{P^{-1}} - sum ||x_{k+1}||^2.
double fogel_radius(const DataRecord<double>& d, const Vec& center, const Mat& shape);

ParamEllipsoid non_falsified_set(const DataRecord<double>& d);

double ellipsoid_form(const ParamEllipsoid& e, const Vec& theta);
bool contains(const ParamEllipsoid& e, const Vec& theta, double tol = kMemberTol);

struct GoalCheck {
  double value;  // (theta_tr - theta_hat)^T D (theta_tr - theta_hat)
  bool met;      // value <= 1 + tol
};

GoalCheck goal_met(const Vec& theta_hat, const Vec& theta_true, const Mat& d_des, double tol = 0.0);

// Ordinary least squares on a short prior experiment, reshaped into (A0, B0).
SystemModel<double> warm_start_estimate(const DataRecord<double>& prior);

// {center, shape, radius, dims: {n_x, n_u, T}}
nlohmann::json ellipsoid_to_json(const ParamEllipsoid& e, Eigen::Index nx, Eigen::Index nu,
                                 Eigen::Index horizon);

}  // namespace texplore
