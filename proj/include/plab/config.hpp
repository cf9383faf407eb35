#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plab/analysis.hpp"
#include "plab/hypotheses.hpp"
#include "plab/reactions.hpp"
#include "plab/solver.hpp"

namespace plab {

/// Configuration error with the offending key path, surfaced as exit
/// code 2 by the CLI.
struct ConfigError : std::runtime_error {
  std::string path;
  ConfigError(std::string key_path, const std::string& msg)
      : std::runtime_error("config error at " + key_path + ": " + msg),
        path(std::move(key_path)) {}
};

struct LadderRequest {
  Region kind = Region::domain;
  double alpha_cap = 400.0;
  std::optional<double> q_tilde;
};

struct TraceFitRequest {
  double q_hat = 2.0;
  std::vector<std::string> family;
  std::vector<double> epsilons;
};

struct TailsRequest {
  int count = 20;                  // auto grids up to 1.05x the level max
  std::vector<double> L, G;        // explicit grids take precedence
};

struct HolderRequest {
  double L = 1.0;
  double alpha = 1.0;
  double M0 = 1.0;
};

/// Declarative experiment: mesh source, operator, reaction registry
/// entries, exponents, solver options and requested analyses. Parsed
/// from a JSON document and validated before execution.
struct ExperimentConfig {
  // mesh
  std::string mesh_kind = "rectangle";  // rectangle | file
  double width = 1.0, height = 1.0;
  int nx = 8, ny = 8;
  std::string mesh_path;
  bool mesh_strict = false;

  // operator
  std::string operator_kind = "p_laplacian";
  double p = 2.0, q = 2.0, mu = 1.0, delta = OperatorFamily::kDefaultDelta;

  // exponents (p is the operator's p)
  int N = 3;
  double q1 = 2.0, q2 = 2.0;

  // reaction registry entries
  nlohmann::json reaction_b, reaction_c;

  GrowthConstants constants;

  SolverOptions solver;
  std::string initial_kind = "zero";
  std::string initial_name = "zero";
  double initial_scale = 1.0;

  bool audit_structure = false;
  bool audit_growth = false;
  std::optional<HolderRequest> audit_holder;
  bool strict_audits = false;

  bool do_solve = true;
  std::vector<LadderRequest> ladders;
  std::optional<TraceFitRequest> trace_fit;
  std::optional<TailsRequest> tails;

  std::string out_dir = "out";
  std::string format = "both";  // json | csv | both

  nlohmann::json raw;  // canonical parsed document, hashed into reports

  static ExperimentConfig parse(const nlohmann::json& j);
  static ExperimentConfig parse_file(const std::string& path);

  Mesh build_mesh() const;
  OperatorFamily build_operator() const;
  ReactionTerm build_reaction() const;
  Exponents build_exponents() const;  // throws ConfigError on invariant violations
  ProblemSpec build_problem() const;
  DiscreteField build_initial(const Mesh& mesh) const;
};

}  // namespace plab
