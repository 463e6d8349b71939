#pragma once

// Flat key = value run configuration. Matrices are referenced by path
// (comma-separated rows, one row per line), resolved against the config's
// directory.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "texplore/experiments.hpp"

namespace texplore {

struct RunConfig {
  std::string system = "paper";  // paper | file
  std::string system_a;
  std::string system_b;
  std::string model0 = "offset";  // offset | file
  double model0_offset = 5e-3;
  std::string model0_a;
  std::string model0_b;

  int horizon = 100;
  std::vector<double> freqs{0.0, 0.1, 0.2, 0.3, 0.4};
  double gamma_w = 10.0;
  std::string d_des = "identity";  // identity | path
  double d_des_scale = 1.0;
  double tol = 1e-4;
  int max_outer_iters = 300;
  std::vector<double> candidate;  // empty: default candidate

  double sigma_w2 = 0.0;  // 0: gamma_w / (T n_x)
  double delta = 0.05;
  bool noise_state_excitation = true;

  std::string disturbance = "cosine";  // cosine | zero | random
  double disturbance_c = 0.316227766016838;

  SolverConfig solver;

  int trials_lemma1 = 1000;
  int trials_theorem1 = 500;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  std::filesystem::path base_dir;  // for relative matrix paths
};

// Throws ConfigError naming the offending key.
RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Emits every key; parse_config() of the output reproduces the config.
void write_config(std::ostream& os, const RunConfig& cfg);

// Loads matrices and checks dimensions and D_des positive definiteness.
ExperimentSetup build_setup(const RunConfig& cfg);

Mat read_matrix_csv(const std::filesystem::path& path);

}  // namespace texplore
