#include "texplore/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace texplore {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Plain number or sqrt(number).
double parse_double(const std::string& key, const std::string& raw) {
  std::string text = trim(raw);
  bool root = false;
  if (text.rfind("sqrt(", 0) == 0 && text.size() > 6 && text.back() == ')') {
    text = trim(text.substr(5, text.size() - 6));
    root = true;
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number, got '" + raw + "'");
  }
  if (root) {
    if (v < 0.0) throw ConfigError(key, "sqrt of a negative number");
    v = std::sqrt(v);
  }
  return v;
}

long long parse_int(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key, "expected an integer, got '" + raw + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  return out;
}

std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += fmt_exact(v[i]);
  }
  return out;
}

std::filesystem::path resolve(const RunConfig& cfg, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || cfg.base_dir.empty() ? path : cfg.base_dir / path;
}

Mat load_matrix_field(const RunConfig& cfg, const std::string& key, const std::string& path) {
  if (path.empty()) throw ConfigError(key, "path is required");
  try {
    return read_matrix_csv(resolve(cfg, path));
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

Mat read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open matrix file");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    rows.push_back(parse_list(path.string(), line));
  }
  check(!rows.empty(), path.string(), "matrix file is empty");
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check(rows[i].size() == rows.front().size(), path.string(), "ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

RunConfig parse_config(std::istream& is, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) throw ConfigError(key, "sections are not supported; use flat key = value");
    const std::string value = trim(node.data());
    if (key == "system") {
      cfg.system = value;
    } else if (key == "system_a") {
      cfg.system_a = value;
    } else if (key == "system_b") {
      cfg.system_b = value;
    } else if (key == "model0") {
      cfg.model0 = value;
    } else if (key == "model0_offset") {
      cfg.model0_offset = parse_double(key, value);
    } else if (key == "model0_a") {
      cfg.model0_a = value;
    } else if (key == "model0_b") {
      cfg.model0_b = value;
    } else if (key == "horizon") {
      cfg.horizon = static_cast<int>(parse_int(key, value));
    } else if (key == "freqs") {
      cfg.freqs = parse_list(key, value);
    } else if (key == "gamma_w") {
      cfg.gamma_w = parse_double(key, value);
    } else if (key == "d_des") {
      cfg.d_des = value;
    } else if (key == "d_des_scale") {
      cfg.d_des_scale = parse_double(key, value);
    } else if (key == "tol") {
      cfg.tol = parse_double(key, value);
    } else if (key == "max_outer_iters") {
      cfg.max_outer_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "candidate") {
      cfg.candidate = parse_list(key, value);
    } else if (key == "sigma_w2") {
      cfg.sigma_w2 = parse_double(key, value);
    } else if (key == "delta") {
      cfg.delta = parse_double(key, value);
    } else if (key == "noise_state_excitation") {
      cfg.noise_state_excitation = parse_bool(key, value);
    } else if (key == "disturbance") {
      cfg.disturbance = value;
    } else if (key == "disturbance_c") {
      cfg.disturbance_c = parse_double(key, value);
    } else if (key == "eig_tol") {
      cfg.solver.eig_tol = parse_double(key, value);
    } else if (key == "feas_tol") {
      cfg.solver.feas_tol = parse_double(key, value);
    } else if (key == "objective_tol") {
      cfg.solver.objective_tol = parse_double(key, value);
    } else if (key == "max_iters") {
      cfg.solver.max_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "trials_lemma1") {
      cfg.trials_lemma1 = static_cast<int>(parse_int(key, value));
    } else if (key == "trials_theorem1") {
      cfg.trials_theorem1 = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      const long long s = parse_int(key, value);
      check(s >= 0, key, "must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else {
      throw ConfigError(key, "unknown key");
    }
  }

  check(cfg.system == "paper" || cfg.system == "file", "system", "must be 'paper' or 'file'");
  check(cfg.model0 == "offset" || cfg.model0 == "file", "model0", "must be 'offset' or 'file'");
  check(cfg.horizon >= 1, "horizon", "must be at least 1");
  check(!cfg.freqs.empty(), "freqs", "at least one frequency is required");
  for (double w : cfg.freqs) check(w >= 0.0 && w <= 0.5, "freqs", "frequencies must lie in [0, 0.5]");
  check(std::set<double>(cfg.freqs.begin(), cfg.freqs.end()).size() == cfg.freqs.size(), "freqs",
        "frequencies must be distinct");
  check(cfg.gamma_w >= 0.0, "gamma_w", "must be non-negative");
  check(cfg.d_des_scale > 0.0, "d_des_scale", "must be positive");
  check(cfg.tol > 0.0, "tol", "must be positive");
  check(cfg.max_outer_iters >= 1, "max_outer_iters", "must be at least 1");
  check(cfg.sigma_w2 >= 0.0, "sigma_w2", "must be non-negative");
  check(cfg.delta > 0.0 && cfg.delta < 1.0, "delta", "must lie in (0, 1)");
  check(cfg.disturbance == "cosine" || cfg.disturbance == "zero" || cfg.disturbance == "random",
        "disturbance", "must be 'cosine', 'zero' or 'random'");
  check(cfg.solver.eig_tol > 0.0, "eig_tol", "must be positive");
  check(cfg.solver.feas_tol > 0.0, "feas_tol", "must be positive");
  check(cfg.solver.objective_tol > 0.0, "objective_tol", "must be positive");
  check(cfg.solver.max_iters >= 1, "max_iters", "must be at least 1");
  check(cfg.trials_lemma1 >= 0, "trials_lemma1", "must be non-negative");
  check(cfg.trials_theorem1 >= 0, "trials_theorem1", "must be non-negative");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& os, const RunConfig& cfg) {
  const auto line = [&](const char* key, const std::string& value) {
    if (!value.empty()) os << key << " = " << value << '\n';
  };
  line("system", cfg.system);
  line("system_a", cfg.system_a);
  line("system_b", cfg.system_b);
  line("model0", cfg.model0);
  line("model0_offset", fmt_exact(cfg.model0_offset));
  line("model0_a", cfg.model0_a);
  line("model0_b", cfg.model0_b);
  line("horizon", std::to_string(cfg.horizon));
  line("freqs", fmt_list(cfg.freqs));
  line("gamma_w", fmt_exact(cfg.gamma_w));
  line("d_des", cfg.d_des);
  line("d_des_scale", fmt_exact(cfg.d_des_scale));
  line("tol", fmt_exact(cfg.tol));
  line("max_outer_iters", std::to_string(cfg.max_outer_iters));
  line("candidate", fmt_list(cfg.candidate));
  line("sigma_w2", fmt_exact(cfg.sigma_w2));
  line("delta", fmt_exact(cfg.delta));
  line("noise_state_excitation", cfg.noise_state_excitation ? "true" : "false");
  line("disturbance", cfg.disturbance);
  line("disturbance_c", fmt_exact(cfg.disturbance_c));
  line("eig_tol", fmt_exact(cfg.solver.eig_tol));
  line("feas_tol", fmt_exact(cfg.solver.feas_tol));
  line("objective_tol", fmt_exact(cfg.solver.objective_tol));
  line("max_iters", std::to_string(cfg.solver.max_iters));
  line("trials_lemma1", std::to_string(cfg.trials_lemma1));
  line("trials_theorem1", std::to_string(cfg.trials_theorem1));
  line("seed", std::to_string(cfg.seed));
  line("output_dir", cfg.output_dir);
}

ExperimentSetup build_setup(const RunConfig& cfg) {
  ExperimentSetup s;
  if (cfg.system == "paper") {
    s.true_system = paper_system();
  } else {
    s.true_system.a = load_matrix_field(cfg, "system_a", cfg.system_a);
    s.true_system.b = load_matrix_field(cfg, "system_b", cfg.system_b);
    check(s.true_system.a.rows() == s.true_system.a.cols(), "system_a", "A must be square");
    check(s.true_system.b.rows() == s.true_system.a.rows(), "system_b", "B row count must match A");
  }
  const Eigen::Index nx = s.true_system.nx();
  const Eigen::Index nu = s.true_system.nu();
  const Eigen::Index m = nx * (nx + nu);

  DesignSpec& d = s.design;
  if (cfg.model0 == "offset") {
    d.model0 = offset_model(s.true_system, cfg.model0_offset);
  } else {
    d.model0.a = load_matrix_field(cfg, "model0_a", cfg.model0_a);
    d.model0.b = load_matrix_field(cfg, "model0_b", cfg.model0_b);
    check(d.model0.a.rows() == nx && d.model0.a.cols() == nx, "model0_a", "must match the system's A");
    check(d.model0.b.rows() == nx && d.model0.b.cols() == nu, "model0_b", "must match the system's B");
  }
  d.horizon = cfg.horizon;
  d.freqs = cfg.freqs;
  d.gamma_w = cfg.gamma_w;
  d.d_des = cfg.d_des == "identity" ? Mat(Mat::Identity(m, m)) : load_matrix_field(cfg, "d_des", cfg.d_des);
  d.d_des *= cfg.d_des_scale;
  check(d.d_des.rows() == m && d.d_des.cols() == m, "d_des",
        "must be " + std::to_string(m) + " x " + std::to_string(m));
  check((d.d_des - d.d_des.transpose()).norm() <= kSymmetryTol * std::max(1.0, d.d_des.norm()), "d_des",
        "must be symmetric");
  check(min_eig(symmetrize(d.d_des)) > 0.0, "d_des", "must be positive definite");
  d.tol = cfg.tol;
  d.max_outer_iters = cfg.max_outer_iters;
  if (!cfg.candidate.empty()) {
    const Eigen::Index want = static_cast<Eigen::Index>(cfg.freqs.size()) * nu;
    check(static_cast<Eigen::Index>(cfg.candidate.size()) == want, "candidate",
          "must have " + std::to_string(want) + " entries");
    d.candidate = Eigen::Map<const Vec>(cfg.candidate.data(), want);
  }
  d.solver = cfg.solver;

  s.baseline.sigma_w2 = cfg.sigma_w2 > 0.0 ? cfg.sigma_w2 : default_sigma_w2(d);
  s.baseline.delta = cfg.delta;
  s.baseline.noise_state_excitation = cfg.noise_state_excitation;

  if (cfg.disturbance == "cosine") {
    s.disturbance = disturbance::StateCosine{cfg.disturbance_c};
  } else if (cfg.disturbance == "random") {
    s.disturbance = disturbance::RandomEnergyCapped{cfg.gamma_w, cfg.seed};
  } else {
    s.disturbance = disturbance::Zero{};
  }
  return s;
}

}  // namespace texplore
