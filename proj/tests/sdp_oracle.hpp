#pragma once

// Brute-force reference for LMI problems with one or two variables. Every
// value returned is the objective at a point checked feasible.

#include <limits>
#include <optional>
#include <random>

#include "test_util.hpp"
#include "texplore/sdp.hpp"

namespace texplore::testing {

inline bool feasible_at(const LmiProblem& p, const Vec& z) {
  for (const auto& b : p.blocks) {
    if (min_eig(b.evaluate(z)) < 0.0) return false;
  }
  return true;
}

// Dense grid over the box, then repeated zoom around the best feasible point.
// Misses feasible slivers thinner than the grid step.
inline std::optional<double> zoom_search(const LmiProblem& p, double radius, int points = 201,
                                         int zoom_levels = 4) {
  const Eigen::Index n = p.num_vars();
  Vec center = Vec::Zero(n);
  double half = radius;
  std::optional<Vec> best;
  double best_val = std::numeric_limits<double>::infinity();
  for (int level = 0; level <= zoom_levels; ++level) {
    const double h = 2.0 * half / (points - 1);
    const int ny = n == 2 ? points : 1;
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < ny; ++j) {
        Vec z(n);
        z(0) = center(0) - half + i * h;
        if (n == 2) z(1) = center(1) - half + j * h;
        const double v = p.objective.dot(z);
        if (v < best_val && feasible_at(p, z)) {
          best_val = v;
          best = z;
        }
      }
    }
    if (!best) return std::nullopt;
    center = *best;
    half = 4.0 * h;
  }
  return best_val;
}

// Two-variable problem: a box |z_i| <= 1 plus one random block that is
// positive definite at the origin. Feasible and bounded by construction.
inline LmiProblem random_small_problem(std::mt19937_64& rng, Eigen::Index nvars) {
  LmiProblem p;
  p.objective = randn(rng, nvars, 1);
  LmiBlock box;
  box.coeffs.push_back(Mat::Identity(2 * nvars, 2 * nvars));
  for (Eigen::Index i = 0; i < nvars; ++i) {
    Mat f = Mat::Zero(2 * nvars, 2 * nvars);
    f(2 * i, 2 * i) = 1.0;
    f(2 * i + 1, 2 * i + 1) = -1.0;
    box.coeffs.push_back(f);
  }
  const Eigen::Index dim = unif_int(rng, 2, 4);
  LmiBlock rnd;
  rnd.coeffs.push_back(rand_spd(rng, dim, 0.05));
  for (Eigen::Index i = 0; i < nvars; ++i) {
    const Mat r = randn(rng, dim, dim);
    rnd.coeffs.push_back(r + r.transpose());
  }
  p.blocks = {box, rnd};
  return p;
}

// Lowest c_free * z(free) along the line through `z` in coordinate `free`:
// grid scan, then bisection from the extreme feasible grid point outwards.
inline std::optional<Vec> line_min(const LmiProblem& p, Vec z, Eigen::Index free, double radius,
                                   int points) {
  const double c = p.objective(free);
  const double h = 2.0 * radius / (points - 1);
  std::optional<int> lo, hi;
  for (int i = 0; i < points; ++i) {
    z(free) = -radius + i * h;
    if (!feasible_at(p, z)) continue;
    if (!lo) lo = i;
    hi = i;
  }
  if (!lo) return std::nullopt;
  const bool down = c > 0.0;
  double in = -radius + (down ? *lo : *hi) * h;
  double out = down ? std::max(-radius, in - h) : std::min(radius, in + h);
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (in + out);
    z(free) = mid;
    (feasible_at(p, z) ? in : out) = mid;
  }
  z(free) = in;
  return z;
}

// Two variables: f(s) = min over the other coordinate is convex in s, so a
// zooming 1-D grid on f brackets its minimum. One variable: a single line.
inline std::optional<double> slice_search(const LmiProblem& p, Eigen::Index outer, double radius,
                                          int points, int zoom_levels) {
  const Eigen::Index n = p.num_vars();
  if (n == 1) {
    const auto z = line_min(p, Vec::Zero(1), 0, radius, points);
    return z ? std::optional<double>(p.objective.dot(*z)) : std::nullopt;
  }
  const Eigen::Index inner = 1 - outer;
  double lo = -radius, hi = radius;
  std::optional<double> best;
  for (int level = 0; level <= zoom_levels; ++level) {
    const double h = (hi - lo) / (points - 1);
    std::optional<double> best_s;
    double level_best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      Vec z = Vec::Zero(2);
      z(outer) = lo + i * h;
      const auto zm = line_min(p, z, inner, radius, points);
      if (!zm) continue;
      const double v = p.objective.dot(*zm);
      if (v < level_best) {
        level_best = v;
        best_s = z(outer);
      }
    }
    if (!best_s) break;
    if (!best || level_best < *best) best = level_best;
    lo = std::max(-radius, *best_s - h);
    hi = std::min(radius, *best_s + h);
  }
  return best;
}

// Minimizes over the box [-radius, radius]^n, n in {1, 2}: best of the zoomed
// grid and the slice searches.
inline std::optional<double> grid_oracle(const LmiProblem& p, double radius, int points = 201,
                                         int zoom_levels = 4) {
  std::optional<double> best = zoom_search(p, radius, points, zoom_levels);
  for (Eigen::Index outer = 0; outer < p.num_vars(); ++outer) {
    const auto v = slice_search(p, outer, radius, points, zoom_levels);
    if (v && (!best || *v < *best)) best = v;
  }
  return best;
}

}  // namespace texplore::testing
