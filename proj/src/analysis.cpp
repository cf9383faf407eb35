#include "plab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Streaming log-sum-exp: accumulates log(sum exp(term_k)) without
// leaving the log domain.
struct LogSumExp {
  double max_term = -kInf;
  double scaled_sum = 0.0;

  void add(double term) {
    if (term == -kInf) return;
    if (scaled_sum == 0.0) {
      max_term = term;
      scaled_sum = 1.0;
      return;
    }
    if (term > max_term) {
      scaled_sum = scaled_sum * std::exp(max_term - term) + 1.0;
      max_term = term;
    } else {
      scaled_sum += std::exp(term - max_term);
    }
  }

  double log_total() const {
    return scaled_sum == 0.0 ? -kInf : max_term + std::log(scaled_sum);
  }
};

const TriangleRule& pick_triangle_rule(double q, NormRule rule) {
  if (rule == NormRule::nodal) return triangle_rule_nodal();
  if (rule == NormRule::gauss) return triangle_rule_deg2();
  return q > 20.0 ? triangle_rule_nodal() : triangle_rule_deg2();
}

const EdgeRule& pick_edge_rule(double q, NormRule rule) {
  if (rule == NormRule::nodal) return edge_rule_nodal();
  if (rule == NormRule::gauss) return edge_rule_gauss2();
  return q > 20.0 ? edge_rule_nodal() : edge_rule_gauss2();
}

double log_abs(double v) { return v == 0.0 ? -kInf : std::log(std::abs(v)); }

}  // namespace

std::string to_string(Region r) {
  return r == Region::domain ? "domain" : "boundary";
}

LogValue lp_norm(const Mesh& mesh, const DiscreteField& u, double q, Region region,
                 NormRule rule) {
  if (!(q >= 1.0) || !std::isfinite(q)) {
    throw std::invalid_argument("lp_norm: exponent must satisfy 1 <= q < inf");
  }
  u.require_valid(mesh);

  LogSumExp acc;
  if (region == Region::domain) {
    const auto& tr = pick_triangle_rule(q, rule);
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const double jac = 2.0 * mesh.triangle_area(t);
      for (std::size_t k = 0; k < tr.points.size(); ++k) {
        const double val = field_value(mesh, u, t, tr.points[k]);
        acc.add(std::log(jac * tr.weights[k]) + q * log_abs(val));
      }
    }
  } else {
    const auto& er = pick_edge_rule(q, rule);
    for (const auto& e : mesh.boundary_edges()) {
      for (std::size_t k = 0; k < er.points.size(); ++k) {
        const double s = er.points[k];
        const double val = (1.0 - s) * u.values[e.a] + s * u.values[e.b];
        acc.add(std::log(e.length * er.weights[k]) + q * log_abs(val));
      }
    }
  }
  return LogValue{acc.log_total() / q};
}

double w1p_norm(const Mesh& mesh, const DiscreteField& u, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("w1p_norm: exponent must satisfy 1 <= p < inf");
  }
  u.require_valid(mesh);

  LogSumExp acc;
  const auto& tr = triangle_rule_deg2();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double area = mesh.triangle_area(t);
    acc.add(std::log(area) + p * log_abs(field_gradient(mesh, u, t).norm()));
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      const double val = field_value(mesh, u, t, tr.points[k]);
      acc.add(std::log(2.0 * area * tr.weights[k]) + p * log_abs(val));
    }
  }
  return std::exp(acc.log_total() / p);
}

std::pair<double, double> sup_norms(const Mesh& mesh, const DiscreteField& u) {
  u.require_valid(mesh);
  const double domain_max = u.values.cwiseAbs().maxCoeff();
  double boundary_max = 0.0;
  for (int i : mesh.boundary_nodes()) {
    boundary_max = std::max(boundary_max, std::abs(u.values[i]));
  }
  return {domain_max, boundary_max};
}

std::pair<double, double> tail_functionals(const Mesh& mesh, const DiscreteField& u,
                                           double p, int N, double L, double G,
                                           NormRule rule) {
  const auto ps = critical_exponent_domain(p, N);
  const auto psb = critical_exponent_boundary(p, N);
  if (!ps || !psb) {
    throw HypothesesError("tail_functionals requires p < N (finite critical exponents)");
  }
  if (!(L >= 0.0) || !(G >= 0.0)) {
    throw std::invalid_argument("tail thresholds must be nonnegative");
  }
  u.require_valid(mesh);

  // a = |u|^{p*-p}; integrand a^{p*/(p*-p)} over {a > L}, all in logs
  auto level_tail = [](double crit, double p_, double threshold, LogSumExp& acc,
                       double log_w, double val) {
    const double gap = crit - p_;
    const double log_a = gap * log_abs(val);
    const bool above = threshold > 0.0 ? log_a > std::log(threshold) : val != 0.0;
    if (above) acc.add(log_w + (crit / gap) * log_a);
  };

  LogSumExp acc_domain;
  const auto& tr = pick_triangle_rule(*ps, rule);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const double jac = 2.0 * mesh.triangle_area(t);
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      const double val = field_value(mesh, u, t, tr.points[k]);
      level_tail(*ps, p, L, acc_domain, std::log(jac * tr.weights[k]), val);
    }
  }

  LogSumExp acc_boundary;
  const auto& er = pick_edge_rule(*psb, rule);
  for (const auto& e : mesh.boundary_edges()) {
    for (std::size_t k = 0; k < er.points.size(); ++k) {
      const double s = er.points[k];
      const double val = (1.0 - s) * u.values[e.a] + s * u.values[e.b];
      level_tail(*psb, p, G, acc_boundary, std::log(e.length * er.weights[k]), val);
    }
  }

  const double H = acc_domain.scaled_sum == 0.0
                       ? 0.0
                       : std::exp((*ps - p) / *ps * acc_domain.log_total());
  const double K = acc_boundary.scaled_sum == 0.0
                       ? 0.0
                       : std::exp((*psb - p) / *psb * acc_boundary.log_total());
  return {H, K};
}

std::vector<double> ladder_part1(double p, int N, int n_steps) {
  const auto ps = critical_exponent_domain(p, N);
  if (!ps) throw HypothesesError("ladder_part1 requires p < N");
  if (n_steps < 1) throw std::invalid_argument("ladder_part1: n_steps must be >= 1");
  const double ratio = *ps / p;
  std::vector<double> kappas;
  kappas.reserve(static_cast<std::size_t>(n_steps));
  for (int n = 1; n <= n_steps; ++n) kappas.push_back(std::pow(ratio, n) - 1.0);
  return kappas;
}

std::vector<double> ladder_part2(double kappa0, double p_star, double q_tilde,
                                 int n_steps) {
  if (!(kappa0 > 0.0)) throw std::invalid_argument("ladder_part2: kappa0 must be > 0");
  if (!(q_tilde > 1.0) || !(q_tilde < p_star)) {
    throw std::invalid_argument("ladder_part2: q_tilde must lie in (p, p_star)");
  }
  if (n_steps < 1) throw std::invalid_argument("ladder_part2: n_steps must be >= 1");
  const double ratio = p_star / q_tilde;
  std::vector<double> kappas;
  kappas.reserve(static_cast<std::size_t>(n_steps));
  for (int n = 1; n <= n_steps; ++n) {
    kappas.push_back((kappa0 + 1.0) * std::pow(ratio, n) - 1.0);
  }
  return kappas;
}

bool bernoulli_check(double kappa, double p) {
  const double lhs = std::pow(kappa + 1.0, p);
  const double rhs = kappa * p + 1.0;
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, rhs);
  return lhs + slack >= rhs;
}

NormLadderReport norm_ladder(const Mesh& mesh, const DiscreteField& u,
                             const Exponents& exps, Region kind,
                             std::optional<double> q_tilde, double alpha_cap) {
  u.require_valid(mesh);
  const auto pc_opt =
      kind == Region::domain ? exps.p_star() : exps.p_star_boundary();
  if (!pc_opt) throw HypothesesError("norm_ladder requires p < N");
  const double pc = *pc_opt;
  const double p = exps.p;
  const double qt = q_tilde.value_or(0.5 * (p + pc));
  if (!(qt > p) || !(qt < pc)) {
    throw std::invalid_argument("norm_ladder: q_tilde must lie in (p, p_star)");
  }

  NormLadderReport report;
  report.kind = kind;
  report.q_tilde = qt;

  const auto sup = sup_norms(mesh, u);
  report.direct_max = kind == Region::domain ? sup.first : sup.second;

  const double kappa0 = pc / p - 1.0;  // seed: (kappa0+1) p = pc
  const double ratio = pc / qt;
  double kappa = kappa0;
  double alpha = (kappa0 + 1.0) * pc;
  if (alpha <= alpha_cap) {
    // rungs below the cap, then the first rung beyond it as terminal
    while (true) {
      report.kappas.push_back(kappa);
      report.alphas.push_back(alpha);
      report.log_norms.push_back(lp_norm(mesh, u, alpha, kind, NormRule::nodal).log);
      if (alpha > alpha_cap) break;
      kappa = (kappa + 1.0) * ratio - 1.0;
      alpha = (kappa + 1.0) * pc;
    }
  }

  if (!report.log_norms.empty()) {
    report.sup_estimate = std::exp(report.log_norms.back());
  }
  if (report.direct_max > 0.0) {
    report.relative_gap =
        std::abs(report.sup_estimate - report.direct_max) / report.direct_max;
  } else {
    report.relative_gap = report.sup_estimate > 0.0 ? kInf : 0.0;
  }

  const double dep_exp = (pc - p) * qt / (qt - p);
  report.dependence_norm =
      lp_norm(mesh, u, std::max(dep_exp, 1.0), kind, NormRule::nodal).value();
  return report;
}

TraceFitReport trace_interpolation_fit(const Mesh& mesh,
                                       const std::vector<DiscreteField>& samples,
                                       const Exponents& exps, double q_hat,
                                       const std::vector<double>& eps_grid) {
  const auto psb = exps.p_star_boundary();
  if (!psb) throw HypothesesError("trace_interpolation_fit requires p < N");
  const double p = exps.p;
  if (!(q_hat >= p) || !(q_hat < *psb)) {
    throw std::invalid_argument("trace_interpolation_fit: need p <= q_hat < p_*");
  }
  if (samples.empty()) throw std::invalid_argument("trace fit needs sample fields");
  if (eps_grid.empty()) throw std::invalid_argument("trace fit needs an epsilon grid");

  struct SampleNorms {
    double trace_p, sobolev_p, lp_p;  // ||u||_{q_hat,bnd}^p, ||u||_{1,p}^p, ||u||_p^p
  };
  std::vector<SampleNorms> norms;
  norms.reserve(samples.size());
  for (const auto& u : samples) {
    SampleNorms n{};
    n.trace_p = std::exp(p * lp_norm(mesh, u, q_hat, Region::boundary).log);
    n.sobolev_p = std::pow(w1p_norm(mesh, u, p), p);
    n.lp_p = std::exp(p * lp_norm(mesh, u, p, Region::domain).log);
    if (!(n.lp_p > 0.0)) {
      throw std::invalid_argument("trace fit samples must be nonzero");
    }
    norms.push_back(n);
  }

  TraceFitReport report;
  report.p = p;
  report.q_hat = q_hat;
  report.epsilons = eps_grid;
  for (double eps : eps_grid) {
    double c = -kInf;
    for (const auto& n : norms) {
      c = std::max(c, (n.trace_p - eps * n.sobolev_p) / n.lp_p);
    }
    report.c_of_eps.push_back(c);
  }

  // log-log least squares over the strictly positive required constants
  std::vector<double> lt, ly;
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (report.c_of_eps[k] > 0.0) {
      lt.push_back(std::log(eps_grid[k]));
      ly.push_back(std::log(report.c_of_eps[k]));
    }
  }
  if (lt.empty()) {
    report.degenerate = true;
    report.inequality_verified = true;
    report.worst_slack = 0.0;
    return report;  // inequality holds with c1 arbitrarily small on this family
  }

  double slope = 0.0;
  if (lt.size() >= 2) {
    double mt = 0, my = 0;
    for (std::size_t k = 0; k < lt.size(); ++k) {
      mt += lt[k];
      my += ly[k];
    }
    mt /= static_cast<double>(lt.size());
    my /= static_cast<double>(lt.size());
    double cov = 0, var = 0;
    for (std::size_t k = 0; k < lt.size(); ++k) {
      cov += (lt[k] - mt) * (ly[k] - my);
      var += (lt[k] - mt) * (lt[k] - mt);
    }
    slope = var > 0.0 ? cov / var : 0.0;
    double rss = 0.0;
    const double intercept = my - slope * mt;
    for (std::size_t k = 0; k < lt.size(); ++k) {
      const double r = ly[k] - (intercept + slope * lt[k]);
      rss += r * r;
    }
    report.regression_residual = std::sqrt(rss / static_cast<double>(lt.size()));
  }
  report.c2_tilde = std::max(-slope, 1e-12);

  // lift the amplitude so the curve dominates every sampled c(eps)
  double c1 = 0.0;
  for (std::size_t k = 0; k < eps_grid.size(); ++k) {
    if (report.c_of_eps[k] > 0.0) {
      c1 = std::max(c1, report.c_of_eps[k] * std::pow(eps_grid[k], report.c2_tilde));
    }
  }
  report.c1_tilde = c1;

  double worst = -kInf;
  for (double eps : eps_grid) {
    const double boost = report.c1_tilde * std::pow(eps, -report.c2_tilde);
    for (const auto& n : norms) {
      const double rhs = eps * n.sobolev_p + boost * n.lp_p;
      worst = std::max(worst, (n.trace_p - rhs) / rhs);
    }
  }
  report.worst_slack = worst;
  report.inequality_verified = worst <= 0.01;
  return report;
}

}  // namespace plab
