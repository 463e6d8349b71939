#pragma once

// Discrete-time LTI models x_{k+1} = A x_k + B u_k + w_k, multisine inputs,
// and forward simulation with pluggable disturbances.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "texplore/matkit.hpp"

namespace texplore {

template <typename Scalar>
struct SystemModel {
  MatX<Scalar> a;  // n_x x n_x
  MatX<Scalar> b;  // n_x x n_u

  Eigen::Index nx() const { return a.rows(); }
  Eigen::Index nu() const { return b.cols(); }
  Eigen::Index nphi() const { return nx() + nu(); }

  // vec([A B]), length n_x (n_x + n_u).
  VecX<Scalar> theta() const {
    MatX<Scalar> ab(nx(), nphi());
    ab << a, b;
    return vec_cols(ab);
  }

  static SystemModel from_theta(const VecX<Scalar>& theta, Eigen::Index nx, Eigen::Index nu) {
    const MatX<Scalar> ab = unvec_cols(theta, nx, nx + nu);
    return {ab.leftCols(nx), ab.rightCols(nu)};
  }

  void validate() const {
    if (a.rows() != a.cols()) throw DimensionMismatch("SystemModel: A is not square");
    if (b.rows() != a.rows()) throw DimensionMismatch("SystemModel: B has wrong row count");
  }
};

// u_k = sum_i a_i cos(2 pi w_i k), k = 0..T-1.
template <typename Scalar>
struct MultisineDesign {
  int horizon = 0;
  std::vector<Scalar> freqs;        // cycles per sample
  std::vector<VecX<Scalar>> amps;   // one n_u vector per frequency
};

// Checks the hard invariants (L >= 1, distinct frequencies, consistent
// amplitude sizes) and returns soft warnings for frequencies off the grid
// {0, 1/T, ..., (T-1)/T}.
template <typename Scalar>
std::vector<std::string> validate_design(const MultisineDesign<Scalar>& design) {
  if (design.freqs.empty()) throw DimensionMismatch("multisine: no frequencies");
  if (design.freqs.size() != design.amps.size()) {
    throw DimensionMismatch("multisine: frequency and amplitude counts differ");
  }
  for (std::size_t i = 0; i < design.freqs.size(); ++i) {
    for (std::size_t j = i + 1; j < design.freqs.size(); ++j) {
      if (design.freqs[i] == design.freqs[j]) {
        throw DimensionMismatch("multisine: duplicate frequency");
      }
    }
    if (design.amps[i].size() != design.amps.front().size()) {
      throw DimensionMismatch("multisine: amplitude vectors differ in length");
    }
  }
  std::vector<std::string> warnings;
  for (const Scalar w : design.freqs) {
    const double scaled = double(w) * design.horizon;
    if (w < Scalar(0) || w >= Scalar(1) || std::abs(scaled - std::round(scaled)) > 1e-9) {
      warnings.push_back("frequency " + std::to_string(double(w)) +
                         " is not on the grid k/T for T = " + std::to_string(design.horizon));
    }
  }
  return warnings;
}

template <typename Scalar>
std::vector<VecX<Scalar>> multisine_inputs(const MultisineDesign<Scalar>& design) {
  validate_design(design);
  const Eigen::Index nu = design.amps.front().size();
  std::vector<VecX<Scalar>> u(design.horizon, VecX<Scalar>::Zero(nu));
  for (int k = 0; k < design.horizon; ++k) {
    for (std::size_t i = 0; i < design.freqs.size(); ++i) {
      u[k] += design.amps[i] * std::cos(Scalar(2) * std::numbers::pi_v<Scalar> * design.freqs[i] * k);
    }
  }
  return u;
}

namespace disturbance {

struct Zero {};

struct FixedSequence {
  std::vector<Vec> w;
};

// w_k = c (-cos(x_{k,1}), 0, ..., 0)^T.
struct StateCosine {
  double c = 0.0;
};

// I.i.d. standard normal draws scaled by min(1, sqrt(gamma_w / energy)) over
// the whole horizon, so the energy bound holds exactly.
struct RandomEnergyCapped {
  double gamma_w = 0.0;
  std::uint64_t seed = 0;
};

}  // namespace disturbance

using DisturbanceSource = std::variant<disturbance::Zero, disturbance::FixedSequence,
                                       disturbance::StateCosine, disturbance::RandomEnergyCapped>;

inline std::vector<Vec> random_energy_capped_sequence(const disturbance::RandomEnergyCapped& spec,
                                                      int horizon, Eigen::Index nx) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> w(horizon, Vec(nx));
  double energy = 0.0;
  for (auto& wk : w) {
    for (Eigen::Index i = 0; i < nx; ++i) wk(i) = normal(rng);
    energy += wk.squaredNorm();
  }
  if (energy > 0.0) {
    const double scale = std::min(1.0, std::sqrt(spec.gamma_w / energy));
    for (auto& wk : w) wk *= scale;
  }
  return w;
}

template <typename Scalar>
struct Trajectory {
  std::vector<VecX<Scalar>> states;        // x_0 .. x_T
  std::vector<VecX<Scalar>> inputs;        // u_0 .. u_{T-1}
  std::vector<VecX<Scalar>> disturbances;  // w_0 .. w_{T-1}, as realized

  int horizon() const { return static_cast<int>(inputs.size()); }
};

template <typename Scalar>
Trajectory<Scalar> simulate(const SystemModel<Scalar>& model, std::span<const VecX<Scalar>> inputs,
                            const DisturbanceSource& source, const VecX<Scalar>& x0) {
  model.validate();
  const Eigen::Index nx = model.nx();
  if (x0.size() != nx) throw DimensionMismatch("simulate: x0 has wrong length");
  const int horizon = static_cast<int>(inputs.size());

  std::vector<Vec> precomputed;
  if (const auto* fixed = std::get_if<disturbance::FixedSequence>(&source)) {
    if (static_cast<int>(fixed->w.size()) < horizon) {
      throw DimensionMismatch("simulate: fixed disturbance sequence is shorter than the horizon");
    }
    precomputed = fixed->w;
  } else if (const auto* rnd = std::get_if<disturbance::RandomEnergyCapped>(&source)) {
    precomputed = random_energy_capped_sequence(*rnd, horizon, nx);
  }

  Trajectory<Scalar> traj;
  traj.states.reserve(horizon + 1);
  traj.inputs.assign(inputs.begin(), inputs.end());
  traj.disturbances.reserve(horizon);
  traj.states.push_back(x0);
  for (int k = 0; k < horizon; ++k) {
    const VecX<Scalar>& x = traj.states.back();
    if (inputs[k].size() != model.nu()) throw DimensionMismatch("simulate: input has wrong length");
    VecX<Scalar> w = VecX<Scalar>::Zero(nx);
    if (const auto* cosine = std::get_if<disturbance::StateCosine>(&source)) {
      w(0) = -Scalar(cosine->c) * std::cos(x(0));
    } else if (!precomputed.empty()) {
      if (precomputed[k].size() != nx) throw DimensionMismatch("simulate: disturbance has wrong length");
      w = precomputed[k].template cast<Scalar>();
    }
    traj.states.push_back(model.a * x + model.b * inputs[k] + w);
    traj.disturbances.push_back(std::move(w));
  }
  return traj;
}

template <typename Scalar>
Trajectory<Scalar> simulate(const SystemModel<Scalar>& model, std::span<const VecX<Scalar>> inputs,
                            const DisturbanceSource& source = disturbance::Zero{}) {
  return simulate(model, inputs, source, VecX<Scalar>::Zero(model.nx()).eval());
}

template <typename Scalar>
Scalar disturbance_energy(std::span<const VecX<Scalar>> w) {
  Scalar energy(0);
  for (const auto& wk : w) energy += wk.squaredNorm();
  return energy;
}

// Stacked regression data: phi = [phi_0 .. phi_{T-1}] with phi_k = (x_k, u_k),
// x = (x_1, .., x_T) stacked into one column.
template <typename Scalar>
struct DataRecord {
  MatX<Scalar> phi;  // n_phi x T
  VecX<Scalar> x;    // T n_x
  Scalar gamma_w = Scalar(0);

  Eigen::Index horizon() const { return phi.cols(); }
  Eigen::Index nphi() const { return phi.rows(); }
  Eigen::Index nx() const { return horizon() == 0 ? 0 : x.size() / horizon(); }

  // Successor states as an n_x x T matrix [x_1 .. x_T].
  MatX<Scalar> successor_matrix() const { return unvec_cols(x, nx(), horizon()); }

  void validate() const {
    if (horizon() < 1) throw DimensionMismatch("DataRecord: empty record");
    if (x.size() != horizon() * nx() || nx() < 1 || nx() >= nphi()) {
      throw DimensionMismatch("DataRecord: X length is inconsistent with Phi");
    }
    if (!std::isfinite(double(gamma_w))) throw DimensionMismatch("DataRecord: gamma_w not finite");
  }
};

template <typename Scalar>
DataRecord<Scalar> pack_data(const Trajectory<Scalar>& traj, Scalar gamma_w = Scalar(0)) {
  const int horizon = traj.horizon();
  if (horizon < 1 || static_cast<int>(traj.states.size()) != horizon + 1) {
    throw DimensionMismatch("pack_data: incomplete trajectory");
  }
  const Eigen::Index nx = traj.states.front().size();
  const Eigen::Index nu = traj.inputs.front().size();
  DataRecord<Scalar> d;
  d.phi.resize(nx + nu, horizon);
  d.x.resize(horizon * nx);
  for (int k = 0; k < horizon; ++k) {
    d.phi.col(k) << traj.states[k], traj.inputs[k];
    d.x.segment(k * nx, nx) = traj.states[k + 1];
  }
  d.gamma_w = gamma_w;
  return d;
}

// k, x_1..x_nx, u_1..u_nu; row T holds the final state with empty input fields.
template <typename Scalar>
void write_trajectory_csv(std::ostream& os, const Trajectory<Scalar>& traj) {
  const Eigen::Index nx = traj.states.front().size();
  const Eigen::Index nu = traj.inputs.empty() ? 0 : traj.inputs.front().size();
  const auto old_precision = os.precision(12);
  os << "k";
  for (Eigen::Index i = 1; i <= nx; ++i) os << ",x_" << i;
  for (Eigen::Index i = 1; i <= nu; ++i) os << ",u_" << i;
  os << "\n";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << k;
    for (Eigen::Index i = 0; i < nx; ++i) os << "," << double(traj.states[k](i));
    for (Eigen::Index i = 0; i < nu; ++i) {
      os << ",";
      if (k < traj.inputs.size()) os << double(traj.inputs[k](i));
    }
    os << "\n";
  }
  os.precision(old_precision);
}

}  // namespace texplore
