#include "plab/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "plab/report.hpp"

namespace plab {

namespace fs = std::filesystem;

namespace {

std::optional<DiscreteField> load_solution(const std::string& path, const Mesh& mesh,
                                           std::string& error) {
  std::ifstream in(path);
  if (!in) {
    error = "cannot open solution file '" + path + "'";
    return std::nullopt;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    error = std::string("solution file parse failure: ") + e.what();
    return std::nullopt;
  }
  const nlohmann::json* values = nullptr;
  if (j.contains("data") && j["data"].contains("field") &&
      j["data"]["field"].contains("values")) {
    values = &j["data"]["field"]["values"];
  } else if (j.contains("values")) {
    values = &j["values"];
  }
  if (!values || !values->is_array()) {
    error = "solution file has no field values";
    return std::nullopt;
  }
  Eigen::VectorXd v(values->size());
  for (std::size_t k = 0; k < values->size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = (*values)[k].get<double>();
  }
  if (v.size() != mesh.node_count()) {
    error = "solution has " + std::to_string(v.size()) + " values but the mesh has " +
            std::to_string(mesh.node_count()) + " nodes";
    return std::nullopt;
  }
  return DiscreteField(std::move(v));
}

}  // namespace

int run_pipeline(const ExperimentConfig& cfg, const RunOptions& opts) {
  const std::string out_dir = opts.out_dir.value_or(cfg.out_dir);
  const std::string format = opts.format.value_or(cfg.format);
  const std::string digest = fnv1a_hex(cfg.raw.dump());

  Mesh mesh;
  ProblemSpec spec;
  try {
    spec = cfg.build_problem();
    mesh = spec.mesh;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const MeshError& e) {
    std::cerr << "config error at mesh: " << e.what() << "\n";
    return kExitConfig;
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "config error at output.dir: cannot create '" << out_dir << "'\n";
    return kExitConfig;
  }

  const bool strict = opts.strict || cfg.strict_audits;
  const bool any_audit = cfg.audit_structure || cfg.audit_growth ||
                         cfg.audit_holder.has_value();

  if (opts.run_audits && any_audit) {
    SampleSpec samples = SampleSpec::defaults();
    samples.seed = opts.seed;
    nlohmann::json data;
    bool all_pass = true;
    if (cfg.audit_structure) {
      const AuditReport rep = check_structure_HA(spec.op, samples);
      all_pass = all_pass && rep.all_pass();
      data["structure"] = to_json(rep);
    }
    if (cfg.audit_growth) {
      const AuditReport rep =
          verify_growth(spec.reaction, spec.op, spec.exponents, cfg.constants, samples);
      all_pass = all_pass && rep.all_pass();
      data["growth"] = to_json(rep);
    }
    if (cfg.audit_holder) {
      GrowthConstants hc = cfg.constants;
      hc.holder_L = cfg.audit_holder->L;
      hc.holder_alpha = cfg.audit_holder->alpha;
      hc.M0 = cfg.audit_holder->M0;
      auto c_fn = spec.reaction.c
                      ? spec.reaction.c
                      : std::function<double(const Vec2&, double)>(
                            [](const Vec2&, double) { return 0.0; });
      const AuditReport rep = verify_boundary_holder(c_fn, hc, samples.boundary_points);
      all_pass = all_pass && rep.all_pass();
      data["holder"] = to_json(rep);
    }
    write_json_file(fs::path(out_dir) / "audit.json",
                    make_report("audit", all_pass ? "ok" : "fail", digest, data));
    if (strict && !all_pass) {
      std::cerr << "audit failed in strict mode; see " << out_dir << "/audit.json\n";
      return kExitAuditFailure;
    }
  }

  std::optional<DiscreteField> field;
  if (opts.run_solve && cfg.do_solve) {
    DiscreteField initial;
    try {
      initial = cfg.build_initial(mesh);
    } catch (const ConfigError& e) {
      std::cerr << e.what() << "\n";
      return kExitConfig;
    }
    try {
      const SolveReport report = solve(spec, initial);
      write_json_file(fs::path(out_dir) / "solve.json",
                      make_report("solve", "ok", digest, to_json(report)));
      field = report.field;
    } catch (const NonConvergenceError& e) {
      nlohmann::json data = to_json(e.best);
      data["error"] = e.what();
      write_json_file(fs::path(out_dir) / "solve.json",
                      make_report("solve", "nonconverged", digest, data));
      std::cerr << "solver did not converge: " << e.what() << "\n";
      return kExitNonConvergence;
    } catch (const SingularLinearizationError& e) {
      nlohmann::json data = to_json(e.best);
      data["error"] = e.what();
      write_json_file(fs::path(out_dir) / "solve.json",
                      make_report("solve", "singular", digest, data));
      std::cerr << "linearization failed: " << e.what() << "\n";
      return kExitNonConvergence;
    }
  } else if (opts.solution_path) {
    std::string error;
    field = load_solution(*opts.solution_path, mesh, error);
    if (!field) {
      std::cerr << "config error at solution: " << error << "\n";
      return kExitConfig;
    }
  }

  if (!opts.run_analysis) return kExitOk;

  const bool needs_field = !cfg.ladders.empty() || cfg.tails.has_value();
  if (needs_field && !field) {
    std::cerr << "config error at analysis: ladder/tail stages need a solved or "
                 "supplied field (missing input)\n";
    return kExitConfig;
  }

  int ladder_index = 0;
  for (const auto& request : cfg.ladders) {
    ++ladder_index;
    const NormLadderReport rep = norm_ladder(mesh, *field, spec.exponents,
                                             request.kind, request.q_tilde,
                                             request.alpha_cap);
    std::string stem = "ladder_" + to_string(request.kind);
    if (ladder_index > 1 &&
        std::count_if(cfg.ladders.begin(), cfg.ladders.begin() + ladder_index - 1,
                      [&](const LadderRequest& r) { return r.kind == request.kind; })) {
      stem += "_" + std::to_string(ladder_index);
    }
    if (format != "csv") {
      write_json_file(fs::path(out_dir) / (stem + ".json"),
                      make_report("ladder", "ok", digest, to_json(rep)));
    }
    if (format != "json") {
      write_ladder_csv(fs::path(out_dir) / (stem + ".csv"), rep);
    }
  }

  if (cfg.trace_fit) {
    std::vector<DiscreteField> family;
    for (const auto& name : cfg.trace_fit->family) {
      try {
        family.push_back(interpolate(mesh, named_expression(name)));
      } catch (const std::invalid_argument& e) {
        std::cerr << "config error at analysis.trace_fit.family: " << e.what() << "\n";
        return kExitConfig;
      }
    }
    const TraceFitReport rep = trace_interpolation_fit(
        mesh, family, spec.exponents, cfg.trace_fit->q_hat, cfg.trace_fit->epsilons);
    write_json_file(fs::path(out_dir) / "trace_fit.json",
                    make_report("trace_fit",
                                rep.inequality_verified ? "ok" : "fail", digest,
                                to_json(rep)));
  }

  if (cfg.tails) {
    const double p = spec.exponents.p;
    const auto ps = spec.exponents.p_star();
    const auto psb = spec.exponents.p_star_boundary();
    if (!ps || !psb) {
      std::cerr << "config error at analysis.tails: requires p < N\n";
      return kExitConfig;
    }
    const auto sup = sup_norms(mesh, *field);
    std::vector<double> Lgrid = cfg.tails->L;
    std::vector<double> Ggrid = cfg.tails->G;
    if (Lgrid.empty()) {
      const double top = 1.05 * std::pow(sup.first, *ps - p);
      for (int k = 0; k < cfg.tails->count; ++k) {
        Lgrid.push_back(top * k / std::max(1, cfg.tails->count - 1));
      }
    }
    if (Ggrid.empty()) {
      const double top = 1.05 * std::pow(sup.second, *psb - p);
      for (int k = 0; k < cfg.tails->count; ++k) {
        Ggrid.push_back(top * k / std::max(1, cfg.tails->count - 1));
      }
    }
    const std::size_t rows = std::max(Lgrid.size(), Ggrid.size());
    std::vector<double> H(rows), K(rows);
    for (std::size_t k = 0; k < rows; ++k) {
      const double L = Lgrid[std::min(k, Lgrid.size() - 1)];
      const double G = Ggrid[std::min(k, Ggrid.size() - 1)];
      const auto hk = tail_functionals(mesh, *field, p, spec.exponents.N, L, G);
      H[k] = hk.first;
      K[k] = hk.second;
    }
    write_json_file(fs::path(out_dir) / "tails.json",
                    make_report("tails", "ok", digest,
                                nlohmann::json{{"L", Lgrid},
                                               {"H", H},
                                               {"G", Ggrid},
                                               {"K", K}}));
  }

  return kExitOk;
}

}  // namespace plab
