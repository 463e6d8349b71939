#include "texplore/sdp.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Sparse>

#include "texplore/io.hpp"

namespace texplore {
namespace {

using Sparse = Eigen::SparseMatrix<double>;

constexpr double kCenteringTol = 1e-7;  // on lambda^2 / 2
constexpr double kArmijo = 0.01;
constexpr double kBacktrack = 0.5;
constexpr double kBarrierGrowth = 10.0;
constexpr double kPhase1Radius = 1e6;  // box half-width around the start, relative
constexpr double kDivergence = 1e12;   // |y| beyond this counts as unbounded

// min c^T y - (1/t) sum_j log det(G_j(y)), G_j(y) = base_j + sum_i y_i C_ji.
class BarrierProblem {
 public:
  struct Block {
    Mat base;
    std::vector<Sparse> coeffs;
    std::vector<bool> active;
  };

  BarrierProblem(const LmiProblem& p, double shift, bool with_slack) : cost_(p.num_vars() + (with_slack ? 1 : 0)) {
    cost_.setZero();
    if (with_slack) {
      cost_(p.num_vars()) = 1.0;
    } else {
      cost_.head(p.num_vars()) = p.objective;
    }
    for (const auto& src : p.blocks) {
      Block b;
      b.base = src.coeffs.front() + shift * Mat::Identity(src.dim(), src.dim());
      for (std::size_t i = 1; i < src.coeffs.size(); ++i) {
        b.coeffs.push_back(src.coeffs[i].sparseView());
        b.active.push_back(b.coeffs.back().nonZeros() > 0);
      }
      if (with_slack) {
        Sparse id(src.dim(), src.dim());
        id.setIdentity();
        b.coeffs.push_back(id);
        b.active.push_back(true);
      }
      weight_ += static_cast<double>(src.dim());
      blocks_.push_back(std::move(b));
    }
  }

  Eigen::Index num_vars() const { return cost_.size(); }
  const Vec& cost() const { return cost_; }
  double weight() const { return weight_; }

  Mat evaluate(std::size_t j, const Vec& y) const {
    const Block& b = blocks_[j];
    Mat g = b.base;
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) {
      if (b.active[i] && y(i) != 0.0) g += y(i) * b.coeffs[i];
    }
    return g;
  }

  // Log-barrier value, or +inf when some block is not positive definite.
  double barrier(const Vec& y, std::vector<Eigen::LLT<Mat>>* factors = nullptr) const {
    double value = 0.0;
    if (factors) factors->clear();
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      Eigen::LLT<Mat> llt(evaluate(j, y));
      if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
      const Vec diag = llt.matrixLLT().diagonal();
      if ((diag.array() <= 0.0).any() || !diag.allFinite()) return std::numeric_limits<double>::infinity();
      value -= 2.0 * diag.array().log().sum();
      if (factors) factors->push_back(std::move(llt));
    }
    return value;
  }

  // Gradient and Hessian of the log-barrier.
  void derivatives(const std::vector<Eigen::LLT<Mat>>& factors, Vec& grad, Mat& hess) const {
    const Eigen::Index n = num_vars();
    grad = Vec::Zero(n);
    hess = Mat::Zero(n, n);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const Block& b = blocks_[j];
      const Eigen::Index dim = b.base.rows();
      // G^{-1} = L^{-T} L^{-1}
      const Mat l_inv = factors[j].matrixL().solve(Mat::Identity(dim, dim));
      Mat inv = Mat::Zero(dim, dim);
      inv.selfadjointView<Eigen::Lower>().rankUpdate(l_inv.transpose());
      inv.triangularView<Eigen::StrictlyUpper>() = inv.transpose();
      std::vector<Mat> prods(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!b.active[i]) continue;
        prods[i] = inv * b.coeffs[i];
        grad(i) -= prods[i].trace();
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!b.active[i]) continue;
        for (Eigen::Index k = 0; k <= i; ++k) {
          if (!b.active[k]) continue;
          const double h = prods[i].cwiseProduct(prods[k].transpose()).sum();
          hess(i, k) += h;
          if (k != i) hess(k, i) += h;
        }
      }
    }
  }

 private:
  Vec cost_;
  std::vector<Block> blocks_;
  double weight_ = 0.0;
};

// t minimizing the Newton decrement of t c^T y + phi(y) at y; 1 when that is
// not positive.
double initial_t(const BarrierProblem& bp, const Vec& y) {
  std::vector<Eigen::LLT<Mat>> factors;
  if (!std::isfinite(bp.barrier(y, &factors))) return 1.0;
  Vec grad;
  Mat hess;
  bp.derivatives(factors, grad, hess);
  const Eigen::LDLT<Mat> ldlt(hess);
  const Vec hc = ldlt.solve(bp.cost());
  const double cc = bp.cost().dot(hc);
  const double t = -grad.dot(hc) / cc;
  if (!(cc > 0.0) || !std::isfinite(t) || t < 1.0) return 1.0;
  return std::min(t, 1e12);
}

struct PathResult {
  Vec y;
  double t = 1.0;
  int steps = 0;
  bool budget_exhausted = false;
  bool early_exit = false;
  bool diverged = false;
};

// Barrier path following from a strictly feasible y. Stops once the gap
// bound weight/t drops below gap_tol(y), when early_exit(y) fires, or when the
// Newton budget runs out.
template <typename GapTol, typename EarlyExit>
PathResult follow_path(const BarrierProblem& bp, Vec y, int budget, GapTol gap_tol,
                       EarlyExit early_exit) {
  PathResult res;
  const double bound = kDivergence * std::max(1.0, y.norm());
  double t = initial_t(bp, y);
  std::vector<Eigen::LLT<Mat>> factors;
  Vec grad;
  Mat hess;
  while (true) {
    // Centering.
    while (true) {
      if (early_exit(y)) {
        res.early_exit = true;
        res.y = y;
        res.t = t;
        return res;
      }
      if (res.steps >= budget) {
        res.budget_exhausted = true;
        res.y = y;
        res.t = t;
        return res;
      }
      const double phi0 = bp.barrier(y, &factors);
      bp.derivatives(factors, grad, hess);
      const Vec g = t * bp.cost() + grad;
      Eigen::LDLT<Mat> ldlt(hess);
      Vec step = -ldlt.solve(g);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || g.dot(step) >= 0.0) {
        const double reg = 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
        step = -(hess + reg * Mat::Identity(hess.rows(), hess.cols())).ldlt().solve(g);
      }
      ++res.steps;
      const double decrement = -g.dot(step);
      if (!(decrement > 0.0) || decrement / 2.0 <= kCenteringTol) break;

      const double f0 = t * bp.cost().dot(y) + phi0;
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        const Vec trial = y + alpha * step;
        if (trial == y) break;
        const double phi1 = bp.barrier(trial);
        if (std::isfinite(phi1) && t * bp.cost().dot(trial) + phi1 <= f0 - kArmijo * alpha * decrement) {
          y = trial;
          moved = true;
          break;
        }
        alpha *= kBacktrack;
      }
      if (!moved) break;  // numerically centered
      if (y.norm() > bound) {
        res.diverged = true;
        res.y = y;
        res.t = t;
        return res;
      }
    }
    if (bp.weight() / t <= gap_tol(y)) break;
    t *= kBarrierGrowth;
  }
  res.y = y;
  res.t = t;
  return res;
}

double min_eig_all(const LmiProblem& p, const Vec& z) {
  double lo = std::numeric_limits<double>::infinity();
  for (const double v : check_feasible(p, z)) lo = std::min(lo, v);
  return lo;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::iteration_limit:
      return "iteration-limit";
  }
  return "unknown";
}

std::vector<double> check_feasible(const LmiProblem& p, const Vec& z) {
  std::vector<double> out;
  out.reserve(p.blocks.size());
  for (const auto& block : p.blocks) out.push_back(min_eig(block.evaluate(z)));
  return out;
}

SolveResult solve(const LmiProblem& p, const SolverConfig& cfg, const std::optional<Vec>& start) {
  p.validate();
  if (!(cfg.eig_tol > 0.0 && cfg.feas_tol > 0.0 && cfg.objective_tol > 0.0 && cfg.max_iters > 0)) {
    throw SolverFailure("solve: solver tolerances and iteration budget must be positive");
  }
  const Eigen::Index n = p.num_vars();
  Vec z = start.value_or(Vec::Zero(n));
  if (z.size() != n) throw DimensionMismatch("solve: start point has wrong length");

  SolveResult res;
  res.strategy = cfg.strategy;

  // Phase I: min s s.t. F(z) + s I > 0, stopped once s <= feas_tol / 2.
  const double lo = min_eig_all(p, z);
  if (lo <= -cfg.feas_tol / 2.0) {
    // Without the box the barrier is unbounded in z whenever some direction
    // makes every block grow.
    const double radius = kPhase1Radius * std::max(1.0, z.cwiseAbs().maxCoeff());
    LmiProblem boxed = p;
    LmiBlock box;
    box.coeffs.push_back(Mat::Zero(2 * n, 2 * n));
    for (Eigen::Index i = 0; i < n; ++i) {
      box.coeffs[0](2 * i, 2 * i) = radius - z(i);
      box.coeffs[0](2 * i + 1, 2 * i + 1) = radius + z(i);
      Mat e = Mat::Zero(2 * n, 2 * n);
      e(2 * i, 2 * i) = 1.0;
      e(2 * i + 1, 2 * i + 1) = -1.0;
      box.coeffs.push_back(std::move(e));
    }
    boxed.blocks.push_back(std::move(box));
    const BarrierProblem phase1(boxed, 0.0, true);
    Vec y(n + 1);
    y << z, -lo + std::max(1.0, 0.1 * std::abs(lo));
    const double target = cfg.feas_tol / 2.0;
    // s - weight/t bounds the optimal slack from below, so stopping once it
    // clears the target is already an infeasibility proof.
    const auto gap_tol = [&](const Vec& v) { return std::max(cfg.feas_tol / 4.0, v(n) - target); };
    const auto reached = [&](const Vec& v) { return v(n) <= target; };
    const PathResult r1 = follow_path(phase1, y, cfg.max_iters, gap_tol, reached);
    res.iterations += r1.steps;
    z = r1.y.head(n);
    if (!r1.early_exit) {
      res.z = z;
      res.objective = p.objective.dot(z);
      res.certificates = check_feasible(p, z);
      if (r1.budget_exhausted || r1.diverged) {
        res.status = SolveStatus::iteration_limit;
        return res;
      }
      res.status = SolveStatus::infeasible;
      InfeasibilityCertificate cert;
      for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        const auto eig = sym_eig(p.blocks[j].evaluate(z));
        if (cert.block < 0 || eig.eigenvalues(0) < cert.value) {
          cert.block = static_cast<int>(j);
          cert.value = eig.eigenvalues(0);
          cert.direction = eig.eigenvectors.col(0);
        }
      }
      res.infeasibility = cert;
      return res;
    }
  }

  // Phase II on the blocks relaxed by feas_tol * I.
  const BarrierProblem phase2(p, cfg.feas_tol, false);
  const auto gap_tol = [&](const Vec& v) {
    return cfg.objective_tol * std::max(1.0, std::abs(p.objective.dot(v)));
  };
  const auto never = [](const Vec&) { return false; };
  const PathResult r2 =
      follow_path(phase2, z, cfg.max_iters - res.iterations, gap_tol, never);
  res.iterations += r2.steps;
  res.z = r2.y;
  res.objective = p.objective.dot(res.z);
  res.certificates = check_feasible(p, res.z);
  res.status = r2.budget_exhausted || r2.diverged ? SolveStatus::iteration_limit : SolveStatus::optimal;
  return res;
}

nlohmann::json solve_result_to_json(const SolveResult& r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["z"] = io::to_json(r.z);
  j["objective"] = io::round12(r.objective);
  j["certificates"] = io::to_json(r.certificates);
  j["iterations"] = r.iterations;
  j["strategy"] = r.strategy;
  if (r.infeasibility) {
    j["infeasibility"] = {{"block", r.infeasibility->block},
                          {"direction", io::to_json(r.infeasibility->direction)},
                          {"value", io::round12(r.infeasibility->value)}};
  }
  return j;
}

}  // namespace texplore
