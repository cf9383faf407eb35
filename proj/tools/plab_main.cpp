#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "plab/hypotheses.hpp"
#include "plab/pipeline.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string format;
  bool strict = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory override");
  cmd->add_option("--format", args.format, "report format: json|csv|both")
      ->check(CLI::IsMember({"json", "csv", "both"}));
  cmd->add_flag("--strict", args.strict, "audit failures become fatal (exit 4)");
  cmd->add_option("--seed", args.seed, "sampling seed for the audits");
}

int run_with(const CommonArgs& args, plab::RunOptions opts) {
  opts.strict = opts.strict || args.strict;
  if (!args.out_dir.empty()) opts.out_dir = args.out_dir;
  if (!args.format.empty()) opts.format = args.format;
  opts.seed = args.seed;
  try {
    const auto cfg = plab::ExperimentConfig::parse_file(args.config_path);
    return plab::run_pipeline(cfg, opts);
  } catch (const plab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return plab::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite element solver and structure-condition auditor for "
               "quasilinear Neumann problems"};
  app.require_subcommand(1);

  CommonArgs run_args, solve_args, audit_args, ladder_args, trace_args;
  std::string solution_path;
  double exp_p = 2.0;
  int exp_N = 3;

  auto* cmd_run = app.add_subcommand("run", "audits, solve and analyses in order");
  add_common(cmd_run, run_args);

  auto* cmd_solve = app.add_subcommand("solve", "solve stage only");
  add_common(cmd_solve, solve_args);

  auto* cmd_audit = app.add_subcommand("audit", "hypothesis audits only");
  add_common(cmd_audit, audit_args);

  auto* cmd_ladder = app.add_subcommand("ladder", "norm ladders for a solved field");
  add_common(cmd_ladder, ladder_args);
  cmd_ladder->add_option("--solution", solution_path,
                         "solve report or {\"values\": [...]} document");

  auto* cmd_trace = app.add_subcommand("trace-fit", "trace interpolation fit only");
  add_common(cmd_trace, trace_args);

  auto* cmd_exp = app.add_subcommand("exponents", "print the critical exponents");
  cmd_exp->add_option("--p", exp_p, "growth exponent")->required();
  cmd_exp->add_option("--N", exp_N, "dimension")->required();

  CLI11_PARSE(app, argc, argv);

  if (cmd_exp->parsed()) {
    try {
      const auto ps = plab::critical_exponent_domain(exp_p, exp_N);
      const auto psb = plab::critical_exponent_boundary(exp_p, exp_N);
      std::cout << "p* = " << plab::format_exponent(ps) << "\n"
                << "p_* = " << plab::format_exponent(psb) << "\n";
      return 0;
    } catch (const plab::HypothesesError& e) {
      std::cerr << e.what() << "\n";
      return plab::kExitConfig;
    }
  }

  if (cmd_run->parsed()) {
    return run_with(run_args, plab::RunOptions{});
  }
  if (cmd_solve->parsed()) {
    plab::RunOptions opts;
    opts.run_audits = false;
    opts.run_analysis = false;
    return run_with(solve_args, opts);
  }
  if (cmd_audit->parsed()) {
    plab::RunOptions opts;
    opts.run_solve = false;
    opts.run_analysis = false;
    return run_with(audit_args, opts);
  }
  if (cmd_ladder->parsed()) {
    if (solution_path.empty()) {
      std::cerr << "config error at solution: the ladder stage needs --solution "
                   "(missing input)\n";
      return plab::kExitConfig;
    }
    plab::RunOptions opts;
    opts.run_audits = false;
    opts.run_solve = false;
    opts.solution_path = solution_path;
    return run_with(ladder_args, opts);
  }
  if (cmd_trace->parsed()) {
    plab::RunOptions opts;
    opts.run_audits = false;
    opts.run_solve = false;
    return run_with(trace_args, opts);
  }
  return 0;
}
