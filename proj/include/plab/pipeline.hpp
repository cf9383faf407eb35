#pragma once

#include <optional>
#include <string>

#include "plab/config.hpp"

namespace plab {

/// CLI exit statuses; these partition the outcomes exactly.
enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNonConvergence = 3,
  kExitAuditFailure = 4,
};

struct RunOptions {
  bool strict = false;  // audit failures become fatal (exit 4)
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::uint64_t seed = 0;

  bool run_audits = true;
  bool run_solve = true;
  bool run_analysis = true;

  /// Pre-solved field for the analysis-only subcommands; reads either a
  /// solve report or a bare {"values": [...]} document.
  std::optional<std::string> solution_path;
};

/// Executes the requested stages in order (audits, solve, analyses) and
/// writes one JSON report per stage plus CSV ladders. Returns the exit
/// status; never throws ConfigError (callers map parse errors to
/// kExitConfig themselves when parsing).
int run_pipeline(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace plab
