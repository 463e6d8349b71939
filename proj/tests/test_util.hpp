#pragma once

#include <random>

#include "texplore/matkit.hpp"

namespace texplore::testing {

inline Mat randn(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Vec randv(std::mt19937_64& rng, Eigen::Index n) { return randn(rng, n, 1); }

inline Mat rand_spd(std::mt19937_64& rng, Eigen::Index n, double floor = 0.1) {
  const Mat r = randn(rng, n, n);
  return r * r.transpose() / static_cast<double>(n) + floor * Mat::Identity(n, n);
}

inline double unif(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int unif_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace texplore::testing
