#include "plab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace plab {

namespace {

void require_finite(const Vec2& x, const Vec2& xi) {
  if (!x.allFinite() || !xi.allFinite()) {
    throw OperatorError("non-finite operator evaluation input");
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Lower-bound ratios are accepted unless they collapse at the box edge:
// a drop below 1% of the median marks a power-type decay and fails the
// bound with the minimizing sample as witness.
constexpr double kDecayFloor = 1e-2;
constexpr double kBlowupCeiling = 1e2;
constexpr double kFitMargin = 0.01;

}  // namespace

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::p_laplacian: return "p_laplacian";
    case OperatorKind::pq_laplacian: return "pq_laplacian";
    case OperatorKind::mean_curvature: return "mean_curvature";
    case OperatorKind::custom: return "custom";
  }
  return "unknown";
}

OperatorFamily OperatorFamily::p_laplacian(double p, double delta) {
  if (!(p > 1.0) || !std::isfinite(p)) throw OperatorError("p must lie in (1,inf)");
  if (!(delta >= 0.0)) throw OperatorError("delta must be nonnegative");
  OperatorFamily fam;
  fam.kind_ = OperatorKind::p_laplacian;
  fam.p_ = p;
  fam.delta_ = delta;
  return fam;
}

OperatorFamily OperatorFamily::pq_laplacian(double p, double q, double mu, double delta) {
  if (!(p > 1.0) || !std::isfinite(p)) throw OperatorError("p must lie in (1,inf)");
  if (!(q > 1.0) || !(q < p)) throw OperatorError("pq_laplacian requires 1 < q < p");
  if (!(mu > 0.0)) throw OperatorError("pq_laplacian requires mu > 0");
  if (!(delta >= 0.0)) throw OperatorError("delta must be nonnegative");
  OperatorFamily fam;
  fam.kind_ = OperatorKind::pq_laplacian;
  fam.p_ = p;
  fam.q_ = q;
  fam.mu_ = mu;
  fam.delta_ = delta;
  return fam;
}

OperatorFamily OperatorFamily::mean_curvature(double p, double delta) {
  if (!(p > 1.0) || !std::isfinite(p)) throw OperatorError("p must lie in (1,inf)");
  if (!(delta >= 0.0)) throw OperatorError("delta must be nonnegative");
  OperatorFamily fam;
  fam.kind_ = OperatorKind::mean_curvature;
  fam.p_ = p;
  fam.delta_ = delta;
  return fam;
}

OperatorFamily OperatorFamily::custom(double p, ScalarFn a0, ScalarFn a0_t,
                                      ScalarFn g0, double delta) {
  if (!(p > 1.0) || !std::isfinite(p)) throw OperatorError("p must lie in (1,inf)");
  if (!a0) throw OperatorError("custom family needs a0");
  if (!(delta >= 0.0)) throw OperatorError("delta must be nonnegative");
  OperatorFamily fam;
  fam.kind_ = OperatorKind::custom;
  fam.p_ = p;
  fam.delta_ = delta;
  fam.a0_ = std::move(a0);
  fam.a0_t_ = std::move(a0_t);
  fam.g0_ = std::move(g0);
  return fam;
}

OperatorFamily OperatorFamily::with_delta(double delta) const {
  if (!(delta >= 0.0)) throw OperatorError("delta must be nonnegative");
  OperatorFamily fam = *this;
  fam.delta_ = delta;
  return fam;
}

double OperatorFamily::coefficient(const Vec2& x, double t) const {
  switch (kind_) {
    case OperatorKind::p_laplacian:
      return p_ == 2.0 ? 1.0 : std::pow(t, p_ - 2.0);
    case OperatorKind::pq_laplacian:
      return (p_ == 2.0 ? 1.0 : std::pow(t, p_ - 2.0)) +
             mu_ * (q_ == 2.0 ? 1.0 : std::pow(t, q_ - 2.0));
    case OperatorKind::mean_curvature:
      return std::exp(0.5 * (p_ - 2.0) * std::log1p(t * t));
    case OperatorKind::custom:
      return a0_(x, t);
  }
  return 0.0;
}

double OperatorFamily::coefficient_dt(const Vec2& x, double t) const {
  switch (kind_) {
    case OperatorKind::p_laplacian:
      return p_ == 2.0 ? 0.0 : (p_ - 2.0) * std::pow(t, p_ - 3.0);
    case OperatorKind::pq_laplacian:
      return (p_ == 2.0 ? 0.0 : (p_ - 2.0) * std::pow(t, p_ - 3.0)) +
             mu_ * (q_ == 2.0 ? 0.0 : (q_ - 2.0) * std::pow(t, q_ - 3.0));
    case OperatorKind::mean_curvature:
      return (p_ - 2.0) * t * std::exp(0.5 * (p_ - 4.0) * std::log1p(t * t));
    case OperatorKind::custom: {
      if (a0_t_) return a0_t_(x, t);
      const double h = 1e-6 * std::max(t, 1e-6);
      return (a0_(x, t + h) - a0_(x, std::max(t - h, 0.0))) /
             (h + std::min(h, t));
    }
  }
  return 0.0;
}

double OperatorFamily::potential0(const Vec2& x, double t) const {
  switch (kind_) {
    case OperatorKind::p_laplacian:
      return std::pow(t, p_) / p_;
    case OperatorKind::pq_laplacian:
      return std::pow(t, p_) / p_ + mu_ * std::pow(t, q_) / q_;
    case OperatorKind::mean_curvature:
      // expm1/log1p keeps the small-t potential free of cancellation
      return std::expm1(0.5 * p_ * std::log1p(t * t)) / p_;
    case OperatorKind::custom: {
      if (g0_) return g0_(x, t);
      // composite Simpson fallback over [0,t]
      const int n = 64;
      double sum = 0.0;
      const double h = t / (2 * n);
      auto f = [&](double s) { return s <= 0.0 ? 0.0 : s * a0_(x, s); };
      for (int k = 0; k < n; ++k) {
        const double s0 = 2 * k * h;
        sum += h / 3.0 * (f(s0) + 4.0 * f(s0 + h) + f(s0 + 2 * h));
      }
      return sum;
    }
  }
  return 0.0;
}

Vec2 OperatorFamily::eval_A(const Vec2& x, const Vec2& xi) const {
  require_finite(x, xi);
  const double t = xi.norm();
  const double td = std::hypot(t, delta_);
  if (td == 0.0 || t == 0.0) return Vec2::Zero();  // limit t A0(x,t) -> 0
  return coefficient(x, td) * xi;
}

double OperatorFamily::eval_G(const Vec2& x, const Vec2& xi) const {
  require_finite(x, xi);
  const double td = std::hypot(xi.norm(), delta_);
  if (delta_ == 0.0) return potential0(x, td);
  return potential0(x, td) - potential0(x, delta_);
}

Mat2 OperatorFamily::eval_jacobian(const Vec2& x, const Vec2& xi) const {
  require_finite(x, xi);
  const double t = xi.norm();
  const double td = std::hypot(t, delta_);
  if (td == 0.0) {
    // xi = 0 with delta = 0: the limit coefficient decides
    double c = std::numeric_limits<double>::quiet_NaN();
    switch (kind_) {
      case OperatorKind::p_laplacian:
        c = p_ > 2.0 ? 0.0 : (p_ == 2.0 ? 1.0 : std::numeric_limits<double>::infinity());
        break;
      case OperatorKind::pq_laplacian: {
        const double cp = p_ > 2.0 ? 0.0 : (p_ == 2.0 ? 1.0 : std::numeric_limits<double>::infinity());
        const double cq = q_ > 2.0 ? 0.0 : (q_ == 2.0 ? 1.0 : std::numeric_limits<double>::infinity());
        c = cp + mu_ * cq;
        break;
      }
      case OperatorKind::mean_curvature:
        c = 1.0;
        break;
      case OperatorKind::custom:
        c = a0_(x, 0.0);
        break;
    }
    if (!std::isfinite(c)) {
      throw OperatorError("singular Jacobian at xi = 0 with delta = 0");
    }
    return c * Mat2::Identity();
  }
  const double c = coefficient(x, td);
  const double cd = coefficient_dt(x, td);
  return c * Mat2::Identity() + (cd / td) * (xi * xi.transpose());
}

namespace {

struct RatioScan {
  double min_value = std::numeric_limits<double>::infinity();
  double max_value = -std::numeric_limits<double>::infinity();
  std::map<std::string, double> min_witness, max_witness;
  std::vector<double> values;

  void add(double v, const Vec2& x, const Vec2& xi) {
    values.push_back(v);
    if (v < min_value) {
      min_value = v;
      min_witness = {{"x", x.x()}, {"y", x.y()}, {"xi_x", xi.x()}, {"xi_y", xi.y()},
                     {"xi_norm", xi.norm()}};
    }
    if (v > max_value) {
      max_value = v;
      max_witness = {{"x", x.x()}, {"y", x.y()}, {"xi_x", xi.x()}, {"xi_y", xi.y()},
                     {"xi_norm", xi.norm()}};
    }
  }
};

}  // namespace

AuditReport check_structure_HA(const OperatorFamily& fam, const SampleSpec& spec,
                               const StructureConstants& supplied) {
  const double p = fam.p();
  const auto mags = spec.xi_magnitudes();
  const auto dirs = spec.directions();
  const auto& xs = spec.x_points.empty() ? SampleSpec::defaults().x_points : spec.x_points;

  AuditReport report;

  // --- positivity of A0 and strict growth of t A0 on the magnitude grid
  {
    AuditCheck pos{.id = "a0_positive", .pass = true,
                   .margin = std::numeric_limits<double>::infinity()};
    AuditCheck inc{.id = "ta0_increasing", .pass = true,
                   .margin = std::numeric_limits<double>::infinity()};
    for (const auto& x : xs) {
      double prev = 0.0;
      bool has_prev = false;
      for (double t : mags) {
        const double a0 = fam.coefficient(x, t);
        if (!std::isfinite(a0)) throw OperatorError("non-finite A0 sample");
        if (a0 < pos.margin) {
          pos.margin = a0;
          pos.witness = {{"x", x.x()}, {"y", x.y()}, {"t", t}};
        }
        const double ta0 = t * a0;
        if (has_prev) {
          const double diff = ta0 - prev;
          if (diff < inc.margin) {
            inc.margin = diff;
            inc.witness = {{"x", x.x()}, {"y", x.y()}, {"t", t}};
          }
        }
        prev = ta0;
        has_prev = true;
      }
    }
    pos.pass = pos.margin > 0.0;
    inc.pass = inc.margin > 0.0;
    report.checks.push_back(pos);
    report.checks.push_back(inc);
  }

  // --- strict monotonicity of A over sampled pairs
  {
    AuditCheck mono{.id = "monotonicity", .pass = true,
                    .margin = std::numeric_limits<double>::infinity()};
    std::vector<Vec2> points;
    points.reserve(mags.size() * dirs.size());
    for (double m : mags)
      for (const auto& d : dirs) points.push_back(m * d);
    std::vector<Vec2> values(points.size());
    for (const auto& x : xs) {
      for (std::size_t i = 0; i < points.size(); ++i) values[i] = fam.eval_A(x, points[i]);
      for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
          const double v = (values[i] - values[j]).dot(points[i] - points[j]);
          if (!std::isfinite(v)) throw OperatorError("non-finite monotonicity sample");
          if (v < mono.margin) {
            mono.margin = v;
            mono.witness = {{"x", x.x()},       {"y", x.y()},
                            {"xi1_x", points[i].x()}, {"xi1_y", points[i].y()},
                            {"xi2_x", points[j].x()}, {"xi2_y", points[j].y()}};
          }
        }
      }
    }
    mono.pass = mono.margin > 0.0;
    report.checks.push_back(mono);
  }

  RatioScan growth, coercive, pot_lower, pot_upper, convexity;
  for (const auto& x : xs) {
    for (double m : mags) {
      for (const auto& d : dirs) {
        const Vec2 xi = m * d;
        const Vec2 A = fam.eval_A(x, xi);
        const double G = fam.eval_G(x, xi);
        const double Axi = A.dot(xi);
        if (!A.allFinite() || !std::isfinite(G)) {
          throw OperatorError("non-finite structure sample");
        }
        const double tp1 = std::pow(m, p - 1.0);
        const double tp = std::pow(m, p);
        growth.add(A.norm() / (1.0 + tp1), x, xi);
        coercive.add((p - 1.0) * Axi / tp, x, xi);
        pot_lower.add(p * (p - 1.0) * G / tp, x, xi);
        pot_upper.add(G / (1.0 + tp), x, xi);
        convexity.add(Axi - G, x, xi);
      }
    }
  }

  auto lower_bound_check = [&](const char* id, const char* constant_name,
                               RatioScan& scan, std::optional<double> given,
                               double scale) {
    AuditCheck c{.id = id, .pass = true, .margin = 0.0};
    if (given) {
      // margin of the supplied bound: min over samples of ratio - required
      c.margin = scan.min_value - *given * scale;
      c.pass = c.margin >= 0.0 && scan.min_value > 0.0;
      c.witness = scan.min_witness;
      c.fitted[constant_name] = *given;
    } else {
      c.margin = scan.min_value;
      c.fitted[constant_name] = (1.0 - kFitMargin) * scan.min_value;
      const double med = median_of(scan.values);
      c.pass = scan.min_value > 0.0 && scan.min_value >= kDecayFloor * med;
      if (!c.pass) {
        c.witness = scan.min_witness;
        c.note = "lower ratio collapses on the sampled box";
      }
    }
    report.checks.push_back(std::move(c));
  };

  auto upper_bound_check = [&](const char* id, const char* constant_name,
                               RatioScan& scan, std::optional<double> given) {
    AuditCheck c{.id = id, .pass = true, .margin = 0.0};
    if (given) {
      c.margin = *given - scan.max_value;
      c.pass = c.margin >= 0.0;
      c.witness = scan.max_witness;
      c.fitted[constant_name] = *given;
    } else {
      c.margin = scan.max_value;
      c.fitted[constant_name] = (1.0 + kFitMargin) * scan.max_value;
      const double med = median_of(scan.values);
      c.pass = std::isfinite(scan.max_value) &&
               (med <= 0.0 || scan.max_value <= kBlowupCeiling * med);
      if (!c.pass) {
        c.witness = scan.max_witness;
        c.note = "upper ratio blows up on the sampled box";
      }
    }
    report.checks.push_back(std::move(c));
  };

  upper_bound_check("growth_a6", "a6", growth, supplied.a6);
  lower_bound_check("coercivity_a3", "a3", coercive, supplied.a3, 1.0);
  lower_bound_check("potential_lower_a3", "a3", pot_lower, supplied.a3, 1.0);
  upper_bound_check("potential_upper_a7", "a7", pot_upper, supplied.a7);

  {
    AuditCheck c{.id = "convexity_G_le_Axi", .pass = true, .margin = convexity.min_value};
    c.pass = convexity.min_value >= -1e-12 * (1.0 + std::abs(convexity.min_value));
    c.witness = convexity.min_witness;
    report.checks.push_back(std::move(c));
  }

  {
    // H(A)(i) limit c > -1, sampled at the smallest grid magnitude only
    AuditCheck c{.id = "small_t_slope", .pass = true,
                 .margin = std::numeric_limits<double>::infinity()};
    const double t0 = mags.front();
    for (const auto& x : xs) {
      const double a0 = fam.coefficient(x, t0);
      const double slope = t0 * fam.coefficient_dt(x, t0) / a0;
      if (slope + 1.0 < c.margin) {
        c.margin = slope + 1.0;
        c.witness = {{"x", x.x()}, {"y", x.y()}, {"t", t0}};
      }
    }
    c.pass = c.margin > 0.0;
    c.note = "limit sampled at smallest grid magnitude";
    report.checks.push_back(std::move(c));
  }

  return report;
}

AuditReport check_theta_profile(const ThetaProfile& profile, double p,
                                double t_min, double t_max, int n) {
  if (!profile.theta) throw OperatorError("theta profile needs theta");
  AuditReport report;
  AuditCheck positive{.id = "theta_positive", .pass = true,
                      .margin = std::numeric_limits<double>::infinity()};
  AuditCheck slope{.id = "slope_bounds", .pass = true,
                   .margin = std::numeric_limits<double>::infinity()};
  AuditCheck growth{.id = "growth_bounds", .pass = true,
                    .margin = std::numeric_limits<double>::infinity()};

  const double step = std::log(t_max / t_min) / std::max(1, n - 1);
  for (int k = 0; k < n; ++k) {
    const double t = t_min * std::exp(step * k);
    const double th = profile.theta(t);
    if (!std::isfinite(th)) throw OperatorError("non-finite theta sample");
    if (th < positive.margin) {
      positive.margin = th;
      positive.witness = {{"t", t}};
    }
    double dth;
    if (profile.theta_prime) {
      dth = profile.theta_prime(t);
    } else {
      const double h = 1e-6 * t;
      dth = (profile.theta(t + h) - profile.theta(t - h)) / (2.0 * h);
    }
    const double s = t * dth / th;
    const double tol = 1e-12 * std::max({1.0, std::abs(s), profile.a2});
    const double slack = std::min(s - profile.a1, profile.a2 - s) + tol;
    if (slack < slope.margin) {
      slope.margin = slack;
      slope.witness = {{"t", t}, {"slope", s}};
    }
    const double tp1 = std::pow(t, p - 1.0);
    const double gtol = 1e-12 * std::max(1.0, th);
    const double gslack =
        std::min(th - profile.a3 * tp1, profile.a4 * (1.0 + tp1) - th) + gtol;
    if (gslack < growth.margin) {
      growth.margin = gslack;
      growth.witness = {{"t", t}, {"theta", th}};
    }
  }
  positive.pass = positive.margin > 0.0;
  slope.pass = slope.margin >= 0.0;
  growth.pass = growth.margin >= 0.0;
  report.checks.push_back(std::move(positive));
  report.checks.push_back(std::move(slope));
  report.checks.push_back(std::move(growth));
  return report;
}

}  // namespace plab
