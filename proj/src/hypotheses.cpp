#include "plab/hypotheses.hpp"

#include <cmath>
#include <limits>

namespace plab {

namespace {

constexpr double kFitMargin = 0.01;

struct BoundScan {
  // tracks the worst defect (value - bound) for supplied constants and
  // the largest quotient value/envelope for fitting
  double worst_defect = -std::numeric_limits<double>::infinity();
  double max_quotient = 0.0;
  std::map<std::string, double> defect_witness, quotient_witness;

  void add(double value, double bound, double envelope,
           std::map<std::string, double> point) {
    const double defect = value - bound;
    if (defect > worst_defect) {
      worst_defect = defect;
      defect_witness = point;
    }
    const double quotient = value / envelope;
    if (quotient > max_quotient) {
      max_quotient = quotient;
      quotient_witness = std::move(point);
    }
  }
};

AuditCheck finish_bound(const char* id, bool have_constants, const BoundScan& scan,
                        std::vector<std::pair<std::string, double>> constants) {
  AuditCheck check;
  check.id = id;
  if (have_constants) {
    check.margin = -scan.worst_defect;
    check.pass = scan.worst_defect <= 0.0;
    check.witness = scan.defect_witness;
    for (auto& [name, value] : constants) check.fitted[name] = value;
  } else {
    const double quotient = std::max(scan.max_quotient, 0.0);
    const double fitted = (1.0 + kFitMargin) * quotient;
    for (auto& [name, value] : constants) {
      (void)value;
      check.fitted[name] = fitted;
    }
    check.margin = kFitMargin * quotient;
    check.pass = std::isfinite(scan.max_quotient);
    check.witness = scan.quotient_witness;
    check.note = scan.max_quotient <= 0.0
                     ? "bound holds with arbitrarily small constants on this box"
                     : "constants fitted from sampled supremum";
  }
  return check;
}

}  // namespace

std::optional<double> critical_exponent_domain(double p, int N) {
  if (!(p > 1.0) || !std::isfinite(p)) throw HypothesesError("p must lie in (1,inf)");
  if (N < 2) throw HypothesesError("N must be an integer >= 2");
  if (p >= static_cast<double>(N)) return std::nullopt;
  return static_cast<double>(N) * p / (static_cast<double>(N) - p);
}

std::optional<double> critical_exponent_boundary(double p, int N) {
  if (!(p > 1.0) || !std::isfinite(p)) throw HypothesesError("p must lie in (1,inf)");
  if (N < 2) throw HypothesesError("N must be an integer >= 2");
  if (p >= static_cast<double>(N)) return std::nullopt;
  return (static_cast<double>(N) - 1.0) * p / (static_cast<double>(N) - p);
}

std::string format_exponent(const std::optional<double>& e) {
  if (!e) return "UNBOUNDED";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", *e);
  return buf;
}

Exponents Exponents::make(double p, int N, double q1, double q2) {
  Exponents e;
  e.p = p;
  e.N = N;
  e.q1 = q1;
  e.q2 = q2;
  const auto ps = critical_exponent_domain(p, N);      // validates p, N
  const auto psb = critical_exponent_boundary(p, N);
  if (!(q1 >= p) || (ps && !(q1 <= *ps))) {
    throw HypothesesError("exponents: q1 must satisfy p <= q1 <= p*");
  }
  if (!(q2 >= p) || (psb && !(q2 <= *psb))) {
    throw HypothesesError("exponents: q2 must satisfy p <= q2 <= p_*");
  }
  return e;
}

AuditReport verify_growth(const ReactionTerm& reaction, const OperatorFamily& fam,
                          const Exponents& exps, const GrowthConstants& consts,
                          const SampleSpec& spec) {
  const double p = exps.p;
  const double q1 = exps.q1;
  const double q2 = exps.q2;
  const auto mags = spec.xi_magnitudes();
  const auto dirs = spec.directions();
  const auto svals = spec.s_values();
  const auto& xs = spec.x_points.empty() ? SampleSpec::defaults().x_points : spec.x_points;
  const auto& bxs =
      spec.boundary_points.empty() ? SampleSpec::defaults().boundary_points : spec.boundary_points;

  AuditReport report;

  const bool h1_given = consts.a1 && consts.a2 && consts.a3;
  const bool h2_given = consts.a4 && consts.a5 && consts.a6;
  const bool h3_given = consts.b1 && consts.b2 && consts.b3;
  const bool h4_given = consts.c1 && consts.c2;

  BoundScan h1, h2, h3;
  for (const auto& x : xs) {
    for (double m : mags) {
      for (const auto& d : dirs) {
        const Vec2 xi = m * d;
        const Vec2 A = fam.eval_A(x, xi);
        const double Axi = A.dot(xi);
        if (!A.allFinite()) {
          throw OperatorError("non-finite A sample in growth audit");
        }
        for (double s : svals) {
          std::map<std::string, double> point{
              {"x", x.x()}, {"y", x.y()}, {"s", s}, {"xi_norm", m}};
          const double sp1 = std::pow(std::abs(s), q1 * (p - 1.0) / p);
          const double sq1 = std::pow(std::abs(s), q1 - 1.0);
          const double xip1 = std::pow(m, p - 1.0);

          const double h1_bound = consts.a1.value_or(1.0) * xip1 +
                                  consts.a2.value_or(1.0) * sp1 +
                                  consts.a3.value_or(1.0);
          h1.add(A.norm(), h1_bound, xip1 + sp1 + 1.0, point);

          // H2 rearranged: a5|s|^q1 + a6 >= a4|xi|^p - A.xi
          const double coercive_defect =
              consts.a4.value_or(1.0) * std::pow(m, p) - Axi;
          const double h2_bound = consts.a5.value_or(1.0) * std::pow(std::abs(s), q1) +
                                  consts.a6.value_or(1.0);
          h2.add(coercive_defect, h2_bound, std::pow(std::abs(s), q1) + 1.0, point);

          if (reaction.b) {
            const double bval = reaction.b(x, s, xi);
            if (!std::isfinite(bval)) {
              throw HypothesesError("non-finite B sample at s=" + std::to_string(s));
            }
            const double xib = std::pow(m, p * (q1 - 1.0) / q1);
            const double h3_bound = consts.b1.value_or(1.0) * xib +
                                    consts.b2.value_or(1.0) * sq1 +
                                    consts.b3.value_or(1.0);
            h3.add(std::abs(bval), h3_bound, xib + sq1 + 1.0, point);
          }
        }
      }
    }
  }

  report.checks.push_back(finish_bound("H1", h1_given, h1,
                                       {{"a1", consts.a1.value_or(0)},
                                        {"a2", consts.a2.value_or(0)},
                                        {"a3", consts.a3.value_or(0)}}));
  report.checks.push_back(finish_bound("H2", h2_given, h2,
                                       {{"a5", consts.a5.value_or(0)},
                                        {"a6", consts.a6.value_or(0)}}));
  if (reaction.b) {
    report.checks.push_back(finish_bound("H3", h3_given, h3,
                                         {{"b1", consts.b1.value_or(0)},
                                          {"b2", consts.b2.value_or(0)},
                                          {"b3", consts.b3.value_or(0)}}));
  }

  if (reaction.c) {
    BoundScan h4;
    for (const auto& x : bxs) {
      for (double s : svals) {
        const double cval = reaction.c(x, s);
        if (!std::isfinite(cval)) {
          throw HypothesesError("non-finite C sample at s=" + std::to_string(s));
        }
        const double sq2 = std::pow(std::abs(s), q2 - 1.0);
        const double bound = consts.c1.value_or(1.0) * sq2 + consts.c2.value_or(1.0);
        h4.add(std::abs(cval), bound, sq2 + 1.0,
               {{"x", x.x()}, {"y", x.y()}, {"s", s}});
      }
    }
    report.checks.push_back(finish_bound("H4", h4_given, h4,
                                         {{"c1", consts.c1.value_or(0)},
                                          {"c2", consts.c2.value_or(0)}}));
  }

  return report;
}

AuditReport verify_boundary_holder(
    const std::function<double(const Vec2&, double)>& c,
    const GrowthConstants& consts, const std::vector<Vec2>& boundary_points) {
  if (!consts.holder_L || !consts.holder_alpha || !consts.M0) {
    throw HypothesesError("verify_boundary_holder needs L, alpha and M0");
  }
  const double L = *consts.holder_L;
  const double alpha = *consts.holder_alpha;
  const double M0 = *consts.M0;
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw HypothesesError("holder_alpha must lie in (0,1]");
  }

  // s-grid on [-M0, M0] including the endpoints and 0
  std::vector<double> svals;
  const int ns = 17;
  for (int k = 0; k < ns; ++k) svals.push_back(-M0 + 2.0 * M0 * k / (ns - 1));

  AuditReport report;
  AuditCheck uniform{.id = "uniform_bound", .pass = true,
                     .margin = std::numeric_limits<double>::infinity()};
  AuditCheck modulus{.id = "holder_modulus", .pass = true, .margin = 0.0};

  struct Sample {
    Vec2 x;
    double s, value;
  };
  std::vector<Sample> samples;
  for (const auto& x : boundary_points) {
    for (double s : svals) {
      const double v = c(x, s);
      if (!std::isfinite(v)) throw HypothesesError("non-finite C sample");
      samples.push_back({x, s, v});
      const double slack = L - std::abs(v);
      if (slack < uniform.margin) {
        uniform.margin = slack;
        uniform.witness = {{"x", x.x()}, {"y", x.y()}, {"s", s}, {"C", v}};
      }
    }
  }
  uniform.pass = uniform.margin >= -1e-12 * std::max(1.0, L);

  double worst_quotient = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double dx = (samples[i].x - samples[j].x).norm();
      const double ds = std::abs(samples[i].s - samples[j].s);
      const double denom = std::pow(dx, alpha) + std::pow(ds, alpha);
      if (denom == 0.0) continue;
      const double quotient = std::abs(samples[i].value - samples[j].value) / denom;
      if (quotient > worst_quotient) {
        worst_quotient = quotient;
        modulus.witness = {{"x1", samples[i].x.x()}, {"y1", samples[i].x.y()},
                           {"s1", samples[i].s},     {"x2", samples[j].x.x()},
                           {"y2", samples[j].x.y()}, {"s2", samples[j].s}};
      }
    }
  }
  modulus.margin = L - worst_quotient;
  modulus.fitted["worst_quotient"] = worst_quotient;
  modulus.pass = worst_quotient <= L * (1.0 + 1e-12);

  report.checks.push_back(std::move(uniform));
  report.checks.push_back(std::move(modulus));
  return report;
}

}  // namespace plab
