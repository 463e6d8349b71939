#include "texplore/lmi.hpp"

#include <cmath>
#include <numbers>

#include "texplore/io.hpp"

namespace texplore {
namespace {

constexpr double kOverflowBound = 1e12;

Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

Eigen::Index state_dim(const Mat& phi, const Vec& x) {
  if (phi.cols() == 0 || x.size() % phi.cols() != 0) {
    throw DimensionMismatch("X length is not a multiple of the horizon");
  }
  const Eigen::Index nx = x.size() / phi.cols();
  if (nx < 1 || nx >= phi.rows()) throw DimensionMismatch("X and Phi dimensions are inconsistent");
  return nx;
}

// (Phi kron I_nx) X = vec(Xmat Phi^T).
Vec kron_phi_x(const Mat& phi, const Vec& x, Eigen::Index nx) {
  return vec_cols(Mat(unvec_cols(x, nx, phi.cols()) * phi.transpose()));
}

}  // namespace

BasisResponses basis_responses(const SystemModel<double>& model0, const std::vector<double>& freqs,
                               int horizon) {
  model0.validate();
  if (freqs.empty()) throw DimensionMismatch("basis_responses: no frequencies");
  if (horizon < 1) throw DimensionMismatch("basis_responses: horizon must be positive");
  BasisResponses br;
  br.horizon = horizon;
  br.nx = model0.nx();
  br.nu = model0.nu();
  br.freqs = freqs;
  for (const double w : freqs) {
    for (Eigen::Index j = 0; j < br.nu; ++j) {
      std::vector<Vec> u(horizon, Vec::Zero(br.nu));
      for (int k = 0; k < horizon; ++k) u[k](j) = std::cos(2.0 * std::numbers::pi * w * k);
      const auto traj = simulate(model0, std::span<const Vec>(u));
      for (const auto& xk : traj.states) {
        if (!xk.allFinite() || xk.cwiseAbs().maxCoeff() > kOverflowBound) {
          throw Overflow("basis_responses: states exceed 1e12; is the initial model Schur stable?");
        }
      }
      auto d = pack_data(traj);
      br.phi.push_back(std::move(d.phi));
      br.x.push_back(std::move(d.x));
    }
  }
  return br;
}

PhiX assemble_phi_x(const BasisResponses& br, const Vec& amps) {
  if (amps.size() != br.num_amplitudes()) {
    throw DimensionMismatch("assemble_phi_x: expected " + std::to_string(br.num_amplitudes()) +
                            " amplitudes, got " + std::to_string(amps.size()));
  }
  PhiX out{Mat::Zero(br.nphi(), br.horizon), Vec::Zero(br.horizon * br.nx)};
  for (Eigen::Index c = 0; c < amps.size(); ++c) {
    out.phi += amps(c) * br.phi[c];
    out.x += amps(c) * br.x[c];
  }
  return out;
}

Mat build_y(const Vec& x_hat, const Mat& phi_hat, const Mat& d_des_half) {
  const Eigen::Index nx = state_dim(phi_hat, x_hat);
  const Eigen::Index m = nx * phi_hat.rows();
  if (d_des_half.rows() != m || d_des_half.cols() != m) {
    throw DimensionMismatch("build_y: D_des^{1/2} must be " + std::to_string(m) + " square");
  }
  const Eigen::Index width = phi_hat.cols() * nx * m;
  Mat y(m + m * m, width);
  y.topRows(m) = d_des_half.transpose() * kron(Mat(x_hat.transpose()), eye(m));
  y.bottomRows(m * m) = kron(kron(phi_hat, eye(nx)), eye(m));
  return y;
}

Mat s_energy(double gamma_e, const Vec& amps) {
  const Eigen::Index n = amps.size();
  Mat s = gamma_e * eye(n + 1);
  s.block(1, 0, n, 1) = amps;
  s.block(0, 1, 1, n) = amps.transpose();
  return s;
}

Mat theorem1_matrix(const Mat& phi, const Vec& x, const Mat& d_des, double gamma_w) {
  const Eigen::Index nx = state_dim(phi, x);
  const Eigen::Index m = nx * phi.rows();
  const Mat y = build_y(x, phi, chol_upper(d_des));
  Mat out = y * y.transpose();
  out.topLeftCorner(m, m) += kron(Mat(phi * phi.transpose()), eye(nx)) - gamma_w * d_des;
  return symmetrize(out);
}

Mat theorem1_matrix(const DataRecord<double>& d, const Mat& d_des) {
  return theorem1_matrix(d.phi, d.x, d_des, d.gamma_w);
}

Mat schur_form_matrix(const Mat& phi, const Vec& x, const Mat& d_des, double gamma_w) {
  const Eigen::Index nx = state_dim(phi, x);
  const Eigen::Index m = nx * phi.rows();
  const Mat r = chol_upper(d_des);
  const Mat p_inv = kron(Mat(phi * phi.transpose()), eye(nx));
  const Vec coupling = kron(phi, eye(nx)) * x;  // (Phi kron I) X
  Mat out(m + m * m, m + m * m);
  out.topLeftCorner(m, m) =
      p_inv - gamma_w * d_des + r.transpose() * kron(Mat::Constant(1, 1, x.squaredNorm()), eye(m)) * r;
  out.topRightCorner(m, m * m) = r.transpose() * kron(Mat(coupling.transpose()), eye(m));
  out.bottomLeftCorner(m * m, m) = kron(Mat(coupling), eye(m)) * r;
  out.bottomRightCorner(m * m, m * m) = kron(p_inv, eye(m));
  return symmetrize(out);
}

Mat schur_form_matrix(const DataRecord<double>& d, const Mat& d_des) {
  return schur_form_matrix(d.phi, d.x, d_des, d.gamma_w);
}

Mat pe_inequality_matrix(const Mat& phi, const Vec& x, const Mat& d_des, double gamma_w) {
  const Eigen::Index nx = state_dim(phi, x);
  const Mat gram = phi * phi.transpose();
  const Mat hat = phi.transpose() * gram.ldlt().solve(phi);  // T x T projector
  const double scalar = gamma_w - x.squaredNorm() + x.dot(kron(hat, eye(nx)) * x);
  return symmetrize(Mat(kron(gram, eye(nx)) - scalar * d_des));
}

RelaxationPoint relaxation_point(const BasisResponses& br, const Vec& candidate,
                                 const Mat& d_des_half) {
  PhiX tilde = assemble_phi_x(br, candidate);
  RelaxationPoint rp;
  rp.l2 = build_y(tilde.x, tilde.phi, d_des_half);
  rp.l1 = std::move(tilde.phi);
  rp.x_tilde = std::move(tilde.x);
  return rp;
}

Mat s_exploration(const Mat& phi_hat, const Mat& y_hat, const RelaxationPoint& rp, double gamma_w,
                  const Mat& d_des) {
  if (phi_hat.rows() != rp.l1.rows() || phi_hat.cols() != rp.l1.cols()) {
    throw DimensionMismatch("s_exploration: Phi and L1 shapes differ");
  }
  if (y_hat.rows() != rp.l2.rows() || y_hat.cols() != rp.l2.cols()) {
    throw DimensionMismatch("s_exploration: Y and L2 shapes differ");
  }
  const Eigen::Index m = d_des.rows();
  if (m % phi_hat.rows() != 0 || y_hat.rows() != m + m * m) {
    throw DimensionMismatch("s_exploration: D_des size is inconsistent with Y");
  }
  const Eigen::Index nx = m / phi_hat.rows();
  const Mat q = phi_hat * rp.l1.transpose() + rp.l1 * phi_hat.transpose() - rp.l1 * rp.l1.transpose();
  const Mat cross = y_hat * rp.l2.transpose();
  Mat out = cross + cross.transpose();
  out.noalias() -= rp.l2 * rp.l2.transpose();
  out.topLeftCorner(m, m) += kron(q, eye(nx)) - gamma_w * d_des;
  return symmetrize(out);
}

Mat s_exploration_structured(const Mat& phi, const Vec& x, const Mat& phi_tilde, const Vec& x_tilde,
                             double gamma_w, const Mat& d_des, const Mat& d_des_half) {
  const Eigen::Index nx = state_dim(phi_tilde, x_tilde);
  if (phi.rows() != phi_tilde.rows() || phi.cols() != phi_tilde.cols() || x.size() != x_tilde.size()) {
    throw DimensionMismatch("s_exploration_structured: candidate and data shapes differ");
  }
  const Eigen::Index m = nx * phi.rows();
  const Mat q = phi * phi_tilde.transpose() + phi_tilde * phi.transpose() -
                phi_tilde * phi_tilde.transpose();
  const Mat q_nx = kron(q, eye(nx));
  // Y L2^T + L2 Y^T - L2 L2^T, top-left: (2 X^T X~ - X~^T X~) D.
  const double s = 2.0 * x.dot(x_tilde) - x_tilde.squaredNorm();
  // Top-right coupling vector: (Phi~ kron I) X + (Phi kron I) X~ - (Phi~ kron I) X~.
  const Vec w = kron_phi_x(phi_tilde, x, nx) + kron_phi_x(phi, x_tilde, nx) -
                kron_phi_x(phi_tilde, x_tilde, nx);

  Mat out = Mat::Zero(m + m * m, m + m * m);
  out.topLeftCorner(m, m) = q_nx + (s - gamma_w) * d_des;
  // R^T (w^T kron I_m): column block i is w_i R^T.
  const Mat r_t = d_des_half.transpose();
  for (Eigen::Index i = 0; i < m; ++i) {
    out.block(0, m + i * m, m, m) = w(i) * r_t;
    out.block(m + i * m, 0, m, m) = w(i) * d_des_half;
  }
  // (Q kron I_nx) kron I_m.
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (q_nx(i, j) != 0.0) out.block(m + i * m, m + j * m, m, m).diagonal().setConstant(q_nx(i, j));
    }
  }
  return symmetrize(out);
}

Mat LmiBlock::evaluate(const Vec& z) const {
  if (z.size() + 1 != static_cast<Eigen::Index>(coeffs.size())) {
    throw DimensionMismatch("LmiBlock::evaluate: variable count mismatch");
  }
  Mat out = coeffs.front();
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) != 0.0) out += z(i) * coeffs[i + 1];
  }
  return out;
}

void LmiProblem::validate() const {
  if (num_vars() == 0) throw DimensionMismatch("LmiProblem: no variables");
  for (const auto& block : blocks) {
    if (static_cast<Eigen::Index>(block.coeffs.size()) != num_vars() + 1) {
      throw DimensionMismatch("LmiProblem: block has wrong number of coefficient matrices");
    }
    for (const auto& f : block.coeffs) {
      if (f.rows() != block.dim() || f.cols() != block.dim()) {
        throw DimensionMismatch("LmiProblem: coefficient matrix has wrong size");
      }
      if ((f - f.transpose()).norm() > kSymmetryTol * std::max(1.0, f.norm())) {
        throw NotSymmetric("LmiProblem: coefficient matrix is not symmetric");
      }
    }
  }
}

namespace {

LmiBlock energy_block(Eigen::Index num_amps) {
  const Eigen::Index n = num_amps + 1;
  LmiBlock block;
  block.coeffs.push_back(Mat::Zero(n, n));
  block.coeffs.push_back(eye(n));
  for (Eigen::Index c = 0; c < num_amps; ++c) {
    Mat f = Mat::Zero(n, n);
    f(0, c + 1) = 1.0;
    f(c + 1, 0) = 1.0;
    block.coeffs.push_back(std::move(f));
  }
  return block;
}

Vec gamma_objective(Eigen::Index num_amps) {
  Vec c = Vec::Zero(num_amps + 1);
  c(0) = 1.0;
  return c;
}

}  // namespace

LmiProblem to_lmi_problem(const BasisResponses& br, const RelaxationPoint& rp, double gamma_w,
                          const Mat& d_des) {
  const Eigen::Index num_amps = br.num_amplitudes();
  const Mat r = chol_upper(d_des);
  LmiProblem p;
  p.objective = gamma_objective(num_amps);
  p.blocks.push_back(energy_block(num_amps));

  const Mat zero_phi = Mat::Zero(br.nphi(), br.horizon);
  const Vec zero_x = Vec::Zero(br.horizon * br.nx);
  const Mat f0 = s_exploration_structured(zero_phi, zero_x, rp.l1, rp.x_tilde, gamma_w, d_des, r);
  LmiBlock explore;
  explore.coeffs.push_back(f0);
  explore.coeffs.push_back(Mat::Zero(f0.rows(), f0.cols()));  // gamma_e does not enter
  for (Eigen::Index c = 0; c < num_amps; ++c) {
    Mat fc = s_exploration_structured(br.phi[c], br.x[c], rp.l1, rp.x_tilde, gamma_w, d_des, r) - f0;
    explore.coeffs.push_back(symmetrize(fc));
  }
  p.blocks.push_back(std::move(explore));
  return p;
}

Mat noise_state_gram(const SystemModel<double>& model0, int horizon) {
  model0.validate();
  const Eigen::Index nx = model0.nx();
  Mat cov = Mat::Zero(nx, nx);
  Mat sum = Mat::Zero(nx, nx);
  for (int k = 0; k < horizon; ++k) {
    sum += cov;
    cov = model0.a * cov * model0.a.transpose() + eye(nx);
  }
  Mat out = Mat::Zero(model0.nphi(), model0.nphi());
  out.topLeftCorner(nx, nx) = symmetrize(sum);
  return out;
}

LmiProblem to_baseline_lmi_problem(const BasisResponses& br, const Mat& l1, const Mat& noise_info,
                                   const Mat& required) {
  const Eigen::Index num_amps = br.num_amplitudes();
  const Eigen::Index m = br.nx * br.nphi();
  if (noise_info.rows() != m || required.rows() != m) {
    throw DimensionMismatch("to_baseline_lmi_problem: information blocks must be " +
                            std::to_string(m) + " square");
  }
  LmiProblem p;
  p.objective = gamma_objective(num_amps);
  p.blocks.push_back(energy_block(num_amps));
  LmiBlock info;
  info.coeffs.push_back(symmetrize(Mat(kron(Mat(-l1 * l1.transpose()), eye(br.nx)) + noise_info - required)));
  info.coeffs.push_back(Mat::Zero(m, m));
  for (Eigen::Index c = 0; c < num_amps; ++c) {
    const Mat q = br.phi[c] * l1.transpose() + l1 * br.phi[c].transpose();
    info.coeffs.push_back(symmetrize(kron(q, eye(br.nx))));
  }
  p.blocks.push_back(std::move(info));
  return p;
}

nlohmann::json lmi_to_json(const LmiProblem& p) {
  nlohmann::json j;
  j["objective"] = io::to_json(p.objective);
  j["blocks"] = nlohmann::json::array();
  for (const auto& block : p.blocks) {
    nlohmann::json b;
    b["dim"] = block.dim();
    b["matrices"] = nlohmann::json::array();
    for (const auto& f : block.coeffs) b["matrices"].push_back(io::to_json_flat(f));
    j["blocks"].push_back(std::move(b));
  }
  return j;
}

LmiProblem lmi_from_json(const nlohmann::json& j) {
  LmiProblem p;
  p.objective = io::vec_from_json(j.at("objective"));
  for (const auto& b : j.at("blocks")) {
    const auto dim = b.at("dim").get<Eigen::Index>();
    LmiBlock block;
    for (const auto& flat : b.at("matrices")) {
      const Vec v = io::vec_from_json(flat);
      if (v.size() != dim * dim) throw DimensionMismatch("lmi_from_json: matrix size does not match dim");
      block.coeffs.push_back(Eigen::Map<const Mat>(v.data(), dim, dim));
    }
    p.blocks.push_back(std::move(block));
  }
  p.validate();
  return p;
}

}  // namespace texplore
