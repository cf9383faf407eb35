#include "plab/config.hpp"

#include <cmath>
#include <fstream>

namespace plab {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& path, const std::string& key,
                  double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(path + "." + key, "expected a number");
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const std::string& key,
            int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer()) {
    throw ConfigError(path + "." + key, "expected an integer");
  }
  return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key,
              bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ConfigError(path + "." + key, "expected a boolean");
  return j[key].get<bool>();
}

std::string get_string(const json& j, const std::string& path, const std::string& key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ConfigError(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

std::optional<double> get_optional(const json& j, const std::string& path,
                                   const std::string& key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_number()) throw ConfigError(path + "." + key, "expected a number");
  return j[key].get<double>();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("$", "top-level document must be an object");
  ExperimentConfig cfg;
  cfg.raw = j;

  if (j.contains("mesh")) {
    const auto& m = j["mesh"];
    if (!m.is_object()) throw ConfigError("mesh", "expected an object");
    cfg.mesh_kind = get_string(m, "mesh", "kind", "rectangle");
    if (cfg.mesh_kind == "rectangle") {
      cfg.width = get_number(m, "mesh", "width", 1.0);
      cfg.height = get_number(m, "mesh", "height", 1.0);
      cfg.nx = get_int(m, "mesh", "nx", 8);
      cfg.ny = get_int(m, "mesh", "ny", cfg.nx);
      if (!(cfg.width > 0) || !(cfg.height > 0)) {
        throw ConfigError("mesh.width", "dimensions must be positive");
      }
      if (cfg.nx < 1 || cfg.ny < 1) {
        throw ConfigError("mesh.nx", "subdivision counts must be >= 1");
      }
    } else if (cfg.mesh_kind == "file") {
      cfg.mesh_path = get_string(m, "mesh", "path", "");
      cfg.mesh_strict = get_bool(m, "mesh", "strict", false);
      if (cfg.mesh_path.empty()) throw ConfigError("mesh.path", "missing mesh file path");
    } else {
      throw ConfigError("mesh.kind", "unknown mesh kind '" + cfg.mesh_kind + "'");
    }
  }

  if (j.contains("operator")) {
    const auto& op = j["operator"];
    if (!op.is_object()) throw ConfigError("operator", "expected an object");
    cfg.operator_kind = get_string(op, "operator", "kind", "p_laplacian");
    cfg.p = get_number(op, "operator", "p", 2.0);
    cfg.q = get_number(op, "operator", "q", 2.0);
    cfg.mu = get_number(op, "operator", "mu", 1.0);
    cfg.delta = get_number(op, "operator", "delta", OperatorFamily::kDefaultDelta);
  }

  if (j.contains("exponents")) {
    const auto& e = j["exponents"];
    if (!e.is_object()) throw ConfigError("exponents", "expected an object");
    cfg.N = get_int(e, "exponents", "N", 3);
    cfg.q1 = get_number(e, "exponents", "q1", cfg.p);
    cfg.q2 = get_number(e, "exponents", "q2", cfg.p);
  } else {
    cfg.q1 = cfg.p;
    cfg.q2 = cfg.p;
  }

  if (j.contains("reaction")) {
    const auto& r = j["reaction"];
    if (!r.is_object()) throw ConfigError("reaction", "expected an object");
    if (r.contains("b")) cfg.reaction_b = r["b"];
    if (r.contains("c")) cfg.reaction_c = r["c"];
  }

  if (j.contains("constants")) {
    const auto& c = j["constants"];
    if (!c.is_object()) throw ConfigError("constants", "expected an object");
    auto grab = [&](const char* key) { return get_optional(c, "constants", key); };
    cfg.constants.a1 = grab("a1");
    cfg.constants.a2 = grab("a2");
    cfg.constants.a3 = grab("a3");
    cfg.constants.a4 = grab("a4");
    cfg.constants.a5 = grab("a5");
    cfg.constants.a6 = grab("a6");
    cfg.constants.b1 = grab("b1");
    cfg.constants.b2 = grab("b2");
    cfg.constants.b3 = grab("b3");
    cfg.constants.c1 = grab("c1");
    cfg.constants.c2 = grab("c2");
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (!s.is_object()) throw ConfigError("solver", "expected an object");
    cfg.solver.rtol = get_number(s, "solver", "rtol", cfg.solver.rtol);
    cfg.solver.atol = get_number(s, "solver", "atol", cfg.solver.atol);
    cfg.solver.max_newton = get_int(s, "solver", "max_newton", cfg.solver.max_newton);
    cfg.solver.max_picard = get_int(s, "solver", "max_picard", cfg.solver.max_picard);
    cfg.solver.armijo_c = get_number(s, "solver", "armijo_c", cfg.solver.armijo_c);
    cfg.solver.continuation =
        get_bool(s, "solver", "continuation", cfg.solver.continuation);
    cfg.solver.delta_start =
        get_number(s, "solver", "delta_start", cfg.solver.delta_start);
    if (auto d = get_optional(s, "solver", "delta")) cfg.solver.delta = d;
    if (!(cfg.solver.rtol >= 0) || !(cfg.solver.atol >= 0)) {
      throw ConfigError("solver.rtol", "tolerances must be nonnegative");
    }
    if (cfg.solver.max_newton < 0 || cfg.solver.max_picard < 0) {
      throw ConfigError("solver.max_newton", "iteration caps must be nonnegative");
    }
    if (s.contains("initial")) {
      const auto& init = s["initial"];
      if (!init.is_object()) throw ConfigError("solver.initial", "expected an object");
      cfg.initial_kind = get_string(init, "solver.initial", "kind", "zero");
      cfg.initial_name = get_string(init, "solver.initial", "name", "zero");
      cfg.initial_scale = get_number(init, "solver.initial", "scale", 1.0);
      if (cfg.initial_kind != "zero" && cfg.initial_kind != "expression") {
        throw ConfigError("solver.initial.kind", "must be 'zero' or 'expression'");
      }
    }
  }

  if (j.contains("audits")) {
    const auto& a = j["audits"];
    if (!a.is_object()) throw ConfigError("audits", "expected an object");
    cfg.audit_structure = get_bool(a, "audits", "structure", false);
    cfg.audit_growth = get_bool(a, "audits", "growth", false);
    cfg.strict_audits = get_bool(a, "audits", "strict", false);
    if (a.contains("holder")) {
      const auto& h = a["holder"];
      if (!h.is_object()) throw ConfigError("audits.holder", "expected an object");
      HolderRequest req;
      req.L = get_number(h, "audits.holder", "L", 1.0);
      req.alpha = get_number(h, "audits.holder", "alpha", 1.0);
      req.M0 = get_number(h, "audits.holder", "M0", 1.0);
      cfg.audit_holder = req;
    }
  }

  cfg.do_solve = get_bool(j, "$", "solve", true);

  if (j.contains("analysis")) {
    const auto& a = j["analysis"];
    if (!a.is_object()) throw ConfigError("analysis", "expected an object");
    if (a.contains("ladders")) {
      if (!a["ladders"].is_array()) throw ConfigError("analysis.ladders", "expected an array");
      int idx = 0;
      for (const auto& item : a["ladders"]) {
        const std::string path = "analysis.ladders[" + std::to_string(idx++) + "]";
        if (!item.is_object()) throw ConfigError(path, "expected an object");
        LadderRequest req;
        const std::string kind = get_string(item, path, "kind", "domain");
        if (kind == "domain") {
          req.kind = Region::domain;
        } else if (kind == "boundary") {
          req.kind = Region::boundary;
        } else {
          throw ConfigError(path + ".kind", "must be 'domain' or 'boundary'");
        }
        req.alpha_cap = get_number(item, path, "alpha_cap", 400.0);
        req.q_tilde = get_optional(item, path, "q_tilde");
        cfg.ladders.push_back(req);
      }
    }
    if (a.contains("trace_fit")) {
      const auto& t = a["trace_fit"];
      if (!t.is_object()) throw ConfigError("analysis.trace_fit", "expected an object");
      TraceFitRequest req;
      req.q_hat = get_number(t, "analysis.trace_fit", "q_hat", cfg.p);
      if (t.contains("family")) {
        if (!t["family"].is_array()) {
          throw ConfigError("analysis.trace_fit.family", "expected an array of names");
        }
        for (const auto& name : t["family"]) {
          if (!name.is_string()) {
            throw ConfigError("analysis.trace_fit.family", "expected string entries");
          }
          req.family.push_back(name.get<std::string>());
        }
      }
      if (t.contains("epsilons")) {
        if (!t["epsilons"].is_array()) {
          throw ConfigError("analysis.trace_fit.epsilons", "expected an array");
        }
        for (const auto& e : t["epsilons"]) req.epsilons.push_back(e.get<double>());
      } else {
        const int kmin = get_int(t, "analysis.trace_fit", "eps_pow2_min", -10);
        const int kmax = get_int(t, "analysis.trace_fit", "eps_pow2_max", 0);
        for (int k = kmax; k >= kmin; --k) req.epsilons.push_back(std::ldexp(1.0, k));
      }
      if (req.family.empty()) {
        req.family = {"one", "x", "y", "xy", "coscos"};
      }
      cfg.trace_fit = req;
    }
    if (a.contains("tails")) {
      const auto& t = a["tails"];
      if (!t.is_object()) throw ConfigError("analysis.tails", "expected an object");
      TailsRequest req;
      req.count = get_int(t, "analysis.tails", "count", 20);
      if (t.contains("L"))
        for (const auto& v : t["L"]) req.L.push_back(v.get<double>());
      if (t.contains("G"))
        for (const auto& v : t["G"]) req.G.push_back(v.get<double>());
      cfg.tails = req;
    }
  }

  if (j.contains("output")) {
    const auto& o = j["output"];
    if (!o.is_object()) throw ConfigError("output", "expected an object");
    cfg.out_dir = get_string(o, "output", "dir", cfg.out_dir);
    cfg.format = get_string(o, "output", "format", cfg.format);
    if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "both") {
      throw ConfigError("output.format", "must be json, csv or both");
    }
  }

  // Validate the exponent invariants and operator construction early so
  // malformed configs fail before any stage runs.
  cfg.build_exponents();
  cfg.build_operator();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("$", std::string("JSON parse failure: ") + e.what());
  }
  return parse(j);
}

Mesh ExperimentConfig::build_mesh() const {
  if (mesh_kind == "rectangle") {
    return structured_rectangle_mesh(width, height, nx, ny);
  }
  std::ifstream in(mesh_path);
  if (!in) throw ConfigError("mesh.path", "cannot open mesh file '" + mesh_path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return load_mesh(text, mesh_strict);
  } catch (const MeshError& e) {
    throw ConfigError("mesh.path", e.what());
  }
}

OperatorFamily ExperimentConfig::build_operator() const {
  try {
    if (operator_kind == "p_laplacian") return OperatorFamily::p_laplacian(p, delta);
    if (operator_kind == "pq_laplacian") {
      return OperatorFamily::pq_laplacian(p, q, mu, delta);
    }
    if (operator_kind == "mean_curvature") {
      return OperatorFamily::mean_curvature(p, delta);
    }
  } catch (const OperatorError& e) {
    throw ConfigError("operator", e.what());
  }
  throw ConfigError("operator.kind", "unknown operator '" + operator_kind + "'");
}

Exponents ExperimentConfig::build_exponents() const {
  try {
    return Exponents::make(p, N, q1, q2);
  } catch (const HypothesesError& e) {
    throw ConfigError("exponents", e.what());
  }
}

ReactionTerm ExperimentConfig::build_reaction() const {
  VolumeSource volume = zero_source();
  if (!reaction_b.is_null()) {
    if (!reaction_b.is_object()) throw ConfigError("reaction.b", "expected an object");
    const std::string kind = get_string(reaction_b, "reaction.b", "kind", "zero");
    if (kind == "zero") {
      volume = zero_source();
    } else if (kind == "constant") {
      volume = constant_source(get_number(reaction_b, "reaction.b", "value", 0.0));
    } else if (kind == "power") {
      volume = power_source(get_number(reaction_b, "reaction.b", "coef", 1.0),
                            get_number(reaction_b, "reaction.b", "r", 2.0));
    } else if (kind == "expression") {
      const std::string name = get_string(reaction_b, "reaction.b", "name", "zero");
      try {
        volume = field_source(get_number(reaction_b, "reaction.b", "coef", 1.0),
                              named_expression(name));
      } catch (const std::invalid_argument& e) {
        throw ConfigError("reaction.b.name", e.what());
      }
    } else {
      throw ConfigError("reaction.b.kind", "unknown volume term '" + kind + "'");
    }
  }

  BoundaryFlux flux = zero_flux();
  if (!reaction_c.is_null()) {
    if (!reaction_c.is_object()) throw ConfigError("reaction.c", "expected an object");
    const std::string kind = get_string(reaction_c, "reaction.c", "kind", "zero");
    if (kind == "zero") {
      flux = zero_flux();
    } else if (kind == "constant") {
      flux = constant_flux(get_number(reaction_c, "reaction.c", "value", 0.0));
    } else if (kind == "robin") {
      std::function<double(const Vec2&)> data;
      if (reaction_c.contains("data")) {
        const std::string name = get_string(reaction_c, "reaction.c", "data", "zero");
        try {
          data = named_expression(name);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("reaction.c.data", e.what());
        }
      }
      flux = robin_flux(get_number(reaction_c, "reaction.c", "beta", 1.0),
                        get_number(reaction_c, "reaction.c", "r", p), data);
    } else if (kind == "even_power") {
      flux = even_power_flux(get_number(reaction_c, "reaction.c", "coef", 1.0),
                             get_number(reaction_c, "reaction.c", "e", 2.0));
    } else {
      throw ConfigError("reaction.c.kind", "unknown boundary term '" + kind + "'");
    }
  }
  return make_reaction(std::move(volume), std::move(flux));
}

ProblemSpec ExperimentConfig::build_problem() const {
  ProblemSpec spec;
  spec.mesh = build_mesh();
  spec.op = build_operator();
  spec.reaction = build_reaction();
  spec.exponents = build_exponents();
  spec.constants = constants;
  spec.options = solver;
  return spec;
}

DiscreteField ExperimentConfig::build_initial(const Mesh& mesh) const {
  if (initial_kind == "zero") return zero_field(mesh);
  try {
    const auto f = named_expression(initial_name);
    const double scale = initial_scale;
    return interpolate(mesh, [f, scale](const Vec2& x) { return scale * f(x); });
  } catch (const std::invalid_argument& e) {
    throw ConfigError("solver.initial.name", e.what());
  }
}

}  // namespace plab
