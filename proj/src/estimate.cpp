#include "texplore/estimate.hpp"

#include "texplore/io.hpp"

namespace texplore {

Mat regressor_gram(const DataRecord<double>& d) {
  d.validate();
  Mat gram = d.phi * d.phi.transpose();
  const double tol_rank = 1e-10 * gram.trace() / static_cast<double>(d.nphi());
  if (!(gram.trace() > 0.0) || min_eig(gram) <= tol_rank) {
    throw RankDeficientData("regressor Gram matrix is singular: data is not persistently exciting");
  }
  return gram;
}

Vec ls_estimate(const DataRecord<double>& d) {
  const Mat gram = regressor_gram(d);
  Eigen::LLT<Mat> llt(gram);
  // Each row of [A B] solves (Phi Phi^T) row^T = Phi x_row^T.
  const Mat rhs = d.phi * d.successor_matrix().transpose();  // n_phi x n_x
  const Mat ab_t = llt.solve(rhs);
  return vec_cols(Mat(ab_t.transpose()));
}

Vec ls_estimate_summation(const DataRecord<double>& d) {
  const Mat gram = regressor_gram(d);
  const Eigen::Index nx = d.nx();
  const Mat eye = Mat::Identity(nx, nx);
  const Mat p_inv = kron(gram, eye);
  Vec acc = Vec::Zero(p_inv.rows());
  for (Eigen::Index k = 0; k < d.horizon(); ++k) {
    const Mat reg = kron(Mat(d.phi.col(k).transpose()), eye);  // n_x x n_x n_phi
    acc += reg.transpose() * d.x.segment(k * nx, nx);
  }
  return p_inv.ldlt().solve(acc);
}

Vec ls_estimate_compact(const DataRecord<double>& d) {
  const Mat gram = regressor_gram(d);
  const Mat eye = Mat::Identity(d.nx(), d.nx());
  const Mat p = kron(Mat(gram.inverse()), eye);
  return p * kron(d.phi, eye) * d.x;
}

Mat info_matrix(const DataRecord<double>& d) {
  d.validate();
  const Mat gram = d.phi * d.phi.transpose();
  return kron(gram, Mat::Identity(d.nx(), d.nx()));
}

double ssr(const DataRecord<double>& d, const Vec& theta) {
  const Eigen::Index nx = d.nx();
  const Mat ab = unvec_cols(theta, nx, d.nphi());
  return (d.successor_matrix() - ab * d.phi).squaredNorm();
}

double fogel_radius(const DataRecord<double>& d, const Vec& center, const Mat& shape) {
  return d.gamma_w + center.dot(shape * center) - d.x.squaredNorm();
}

ParamEllipsoid non_falsified_set(const DataRecord<double>& d) {
  ParamEllipsoid e;
  e.center = ls_estimate(d);
  e.shape = info_matrix(d);
  e.radius = fogel_radius(d, e.center, e.shape);
  return e;
}

double ellipsoid_form(const ParamEllipsoid& e, const Vec& theta) {
  if (theta.size() != e.center.size()) throw DimensionMismatch("ellipsoid: theta has wrong length");
  const Vec diff = theta - e.center;
  return diff.dot(e.shape * diff);
}

bool contains(const ParamEllipsoid& e, const Vec& theta, double tol) {
  if (e.empty()) return false;
  return ellipsoid_form(e, theta) <= e.radius + tol * std::max(1.0, std::abs(e.radius));
}

GoalCheck goal_met(const Vec& theta_hat, const Vec& theta_true, const Mat& d_des, double tol) {
  if (theta_hat.size() != theta_true.size() || d_des.rows() != theta_hat.size()) {
    throw DimensionMismatch("goal_met: dimensions do not match");
  }
  const Vec diff = theta_true - theta_hat;
  const double value = diff.dot(d_des * diff);
  return {value, value <= 1.0 + tol};
}

SystemModel<double> warm_start_estimate(const DataRecord<double>& prior) {
  const Vec theta = ls_estimate(prior);
  return SystemModel<double>::from_theta(theta, prior.nx(), prior.nphi() - prior.nx());
}

nlohmann::json ellipsoid_to_json(const ParamEllipsoid& e, Eigen::Index nx, Eigen::Index nu,
                                 Eigen::Index horizon) {
  nlohmann::json j;
  j["center"] = io::to_json(e.center);
  j["shape"] = io::to_json(e.shape);
  j["radius"] = io::round12(e.radius);
  j["dims"] = {{"n_x", nx}, {"n_u", nu}, {"T", horizon}};
  return j;
}

}  // namespace texplore
