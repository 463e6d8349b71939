// texplore: design, apply and check exploration inputs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "texplore/config.hpp"
#include "texplore/experiments.hpp"
#include "texplore/io.hpp"

namespace fs = std::filesystem;
using namespace texplore;

namespace {

enum Exit : int {
  kOk = 0,
  kConfigError = 1,
  kInfeasible = 2,
  kNoConvergence = 3,
  kPropertyViolation = 4,
  kInternalError = 5,
};

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string method = "nonstochastic";
  std::string lmi;
  bool dump_lmi = false;
};

struct Context {
  RunConfig cfg;
  ExperimentSetup setup;
  fs::path out;
};

Context load(const Options& opt) {
  Context ctx;
  ctx.cfg = load_config(opt.config);
  if (opt.seed) ctx.cfg.seed = *opt.seed;
  if (!opt.out.empty()) ctx.cfg.output_dir = opt.out;
  ctx.setup = build_setup(ctx.cfg);
  ctx.out = ctx.cfg.output_dir;
  fs::create_directories(ctx.out);
  return ctx;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  os << j.dump(2) << '\n';
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream os(path);
  writer(os);
}

bool wants(const Options& opt, const char* method) { return opt.method == "both" || opt.method == method; }

std::vector<DesignResult> run_designs(const Context& ctx, const Options& opt) {
  std::vector<DesignResult> designs;
  if (wants(opt, "nonstochastic")) designs.push_back(design_nonstochastic(ctx.setup.design));
  if (wants(opt, "stochastic")) {
    DesignResult d = design_stochastic_baseline(ctx.setup.design, ctx.setup.baseline);
    if (!designs.empty()) d = rescale_to_energy(d, design_energy(designs.front().amps));
    designs.push_back(std::move(d));
  }
  return designs;
}

const char* file_tag(const DesignResult& d) {
  return d.method == DesignMethod::nonstochastic ? "nonstochastic" : "stochastic";
}

int converged_code(const std::vector<DesignResult>& designs) {
  for (const auto& d : designs) {
    if (!d.converged) {
      std::cerr << "warning: " << to_string(d.method) << " design did not converge in "
                << d.outer_iterations << " outer iterations\n";
      return kNoConvergence;
    }
  }
  return kOk;
}

int cmd_design(const Options& opt) {
  const Context ctx = load(opt);
  if (opt.dump_lmi) {
    const DesignSpec& spec = ctx.setup.design;
    const BasisResponses br = basis_responses(spec.model0, spec.freqs, spec.horizon);
    const Vec cand = spec.candidate.value_or(default_candidate(br.num_amplitudes(), spec.gamma_w));
    const RelaxationPoint rp = relaxation_point(br, cand, chol_upper(spec.d_des));
    write_json(ctx.out / "lmi_problem.json", lmi_to_json(to_lmi_problem(br, rp, spec.gamma_w, spec.d_des)));
  }
  const auto designs = run_designs(ctx, opt);
  for (const auto& d : designs) {
    write_json(ctx.out / (std::string("design_") + file_tag(d) + ".json"), design_to_json(d));
    std::cout << to_string(d.method) << ": gamma_e = " << io::fmt12(d.gamma_e)
              << ", energy = " << io::fmt12(design_energy(d.amps)) << ", outer iterations = "
              << d.outer_iterations << (d.converged ? "" : " (not converged)") << '\n';
  }
  write_file(ctx.out / "profile.csv", [&](std::ostream& os) {
    if (designs.size() == 2) {
      write_profile_csv(os, designs[0], designs[1]);
    } else {
      write_profile_csv(os, designs.front());
    }
  });
  return converged_code(designs);
}

int cmd_explore(const Options& opt) {
  const Context ctx = load(opt);
  const auto designs = run_designs(ctx, opt);
  for (const auto& d : designs) {
    const std::string tag = file_tag(d);
    const ExplorationOutcome run = run_exploration(ctx.setup, d);
    write_json(ctx.out / ("design_" + tag + ".json"), design_to_json(d));
    write_file(ctx.out / ("trajectory_" + tag + ".csv"),
               [&](std::ostream& os) { write_trajectory_csv(os, run.trajectory); });
    const Eigen::Index nx = ctx.setup.true_system.nx();
    write_json(ctx.out / ("ellipsoid_" + tag + ".json"),
               ellipsoid_to_json(run.ellipsoid, nx, ctx.setup.true_system.nu(), ctx.setup.design.horizon));
    nlohmann::json report = report_to_json(run.report);
    report["warnings"] = run.warnings;
    write_json(ctx.out / ("report_" + tag + ".json"), report);
    for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << to_string(d.method) << ": error = " << io::fmt12(run.report.error_norm)
              << ", goal quadratic form = " << io::fmt12(run.report.goal_form)
              << (run.report.goal_met ? " (met)" : " (not met)") << '\n';
  }
  return converged_code(designs);
}

int cmd_verify(const Options& opt) {
  const Context ctx = load(opt);
  const VerifySummary l1 = verify_lemma1(ctx.cfg.trials_lemma1, ctx.cfg.seed);
  const VerifySummary t1 = verify_theorem1(ctx.cfg.trials_theorem1, ctx.cfg.seed);
  write_json(ctx.out / "verify.json", {{"lemma1", verify_to_json(l1)}, {"theorem1", verify_to_json(t1)}});
  const auto line = [](const char* name, const VerifySummary& s) {
    std::cout << name << ": " << s.passed << "/" << s.applicable << " applicable trials pass ("
              << s.trials << " run, " << s.skipped << " skipped)" << (s.ok() ? "" : " FAILED") << '\n';
  };
  line("membership", l1);
  line("goal implication", t1);
  return l1.ok() && t1.ok() ? kOk : kPropertyViolation;
}

int cmd_compare(const Options& opt) {
  const Context ctx = load(opt);
  const ComparisonResult c = run_comparison(ctx.setup);
  write_file(ctx.out / "fig1_profile.csv",
             [&](std::ostream& os) { write_profile_csv(os, c.nonstochastic, c.baseline); });
  write_file(ctx.out / "table1.csv", [&](std::ostream& os) {
    write_table_csv(os, {c.nonstochastic_run.report, c.baseline_run.report});
  });
  nlohmann::json report = comparison_to_json(c);
  report["seed"] = ctx.cfg.seed;
  write_json(ctx.out / "report.json", report);
  write_file(ctx.out / "config_used.cfg", [&](std::ostream& os) { write_config(os, ctx.cfg); });
  for (const auto* r : {&c.nonstochastic_run.report, &c.baseline_run.report}) {
    std::cout << r->method << ": error = " << io::fmt12(r->error_norm)
              << ", goal quadratic form = " << io::fmt12(r->goal_form) << '\n';
  }
  return converged_code({c.nonstochastic, c.baseline});
}

int cmd_solve(const Options& opt) {
  std::ifstream in(opt.lmi);
  if (!in) throw ConfigError("--lmi", "cannot open '" + opt.lmi + "'");
  LmiProblem p;
  try {
    p = lmi_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("--lmi", e.what());
  }
  SolverConfig cfg;
  if (!opt.config.empty()) cfg = load_config(opt.config).solver;
  const SolveResult r = solve(p, cfg);
  const fs::path out = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
  fs::create_directories(out);
  write_json(out / "solve_result.json", solve_result_to_json(r));
  std::cout << to_string(r.status) << ": objective = " << io::fmt12(r.objective) << '\n';
  if (r.status == SolveStatus::infeasible) return kInfeasible;
  if (r.status == SolveStatus::iteration_limit) return kNoConvergence;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design multisine exploration inputs with guaranteed parameter error bounds"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opt.config, "Run configuration file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory (overrides output_dir)");
    sub->add_option("--seed", opt.seed, "Random seed (overrides seed)");
    sub->add_option("--method", opt.method, "Design method")
        ->check(CLI::IsMember({"nonstochastic", "stochastic", "both"}));
  };
  auto* design = app.add_subcommand("design", "Design exploration amplitudes");
  common(design, true);
  design->add_flag("--dump-lmi", opt.dump_lmi, "Also write the first relaxation as lmi_problem.json");
  auto* explore = app.add_subcommand("explore", "Design, apply to the true system, and estimate");
  common(explore, true);
  auto* verify = app.add_subcommand("verify", "Monte-Carlo checks of the set-membership guarantees");
  common(verify, true);
  auto* compare = app.add_subcommand("compare", "Non-stochastic design against the Gaussian baseline");
  common(compare, true);
  auto* solve_cmd = app.add_subcommand("solve", "Solve an LMI problem file");
  common(solve_cmd, false);
  solve_cmd->add_option("--lmi", opt.lmi, "LmiProblem JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*design) return cmd_design(opt);
    if (*explore) return cmd_explore(opt);
    if (*verify) return cmd_verify(opt);
    if (*compare) return cmd_compare(opt);
    if (*solve_cmd) return cmd_solve(opt);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SolverInfeasible& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInfeasible;
  } catch (const SolverFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const NoConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}
