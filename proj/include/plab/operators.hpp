#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "plab/audit.hpp"
#include "plab/geometry.hpp"

namespace plab {

struct OperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OperatorKind { p_laplacian, pq_laplacian, mean_curvature, custom };

std::string to_string(OperatorKind kind);

/// Leading nonlinearity of the form A(x,xi) = A0(x,|xi|) xi together with
/// its potential G and Jacobian. Evaluations regularize the gradient
/// magnitude as |xi|_delta = sqrt(|xi|^2 + delta^2) so Newton sees finite
/// Jacobians near xi = 0; delta = 0 is allowed for evaluation when the
/// coefficient stays finite there (p >= 2 for power-type kinds).
///
/// Immutable and shareable; all evaluations are pure. Custom callables
/// must be re-entrant.
class OperatorFamily {
public:
  /// A0(x,t) evaluated away from t=0; signature (x, t).
  using ScalarFn = std::function<double(const Vec2&, double)>;

  static constexpr double kDefaultDelta = 1e-10;

  static OperatorFamily p_laplacian(double p, double delta = kDefaultDelta);
  static OperatorFamily pq_laplacian(double p, double q, double mu,
                                     double delta = kDefaultDelta);
  static OperatorFamily mean_curvature(double p, double delta = kDefaultDelta);

  /// Custom family from the radial coefficient a0(x,t), its t-derivative,
  /// and the scalar potential g0(x,t) with g0(x,0) = 0 and g0' = t a0.
  static OperatorFamily custom(double p, ScalarFn a0, ScalarFn a0_t, ScalarFn g0,
                               double delta = kDefaultDelta);

  OperatorKind kind() const { return kind_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double mu() const { return mu_; }
  double delta() const { return delta_; }

  /// Same family with a different regularization parameter.
  OperatorFamily with_delta(double delta) const;

  /// Radial coefficient A0(x,t), t > 0 (no regularization applied).
  double coefficient(const Vec2& x, double t) const;
  double coefficient_dt(const Vec2& x, double t) const;
  /// G0(x,t) = int_0^t s A0(x,s) ds, the radial potential.
  double potential0(const Vec2& x, double t) const;

  /// A0(x,|xi|_delta) xi; the zero vector at xi = 0.
  Vec2 eval_A(const Vec2& x, const Vec2& xi) const;
  /// Potential with the same regularization, shifted so G(x,0) = 0.
  double eval_G(const Vec2& x, const Vec2& xi) const;
  /// Jacobian of eval_A in xi. Throws OperatorError at xi = 0 when
  /// delta = 0 and the coefficient is singular there.
  Mat2 eval_jacobian(const Vec2& x, const Vec2& xi) const;

private:
  OperatorFamily() = default;

  OperatorKind kind_ = OperatorKind::p_laplacian;
  double p_ = 2.0;
  double q_ = 2.0;
  double mu_ = 0.0;
  double delta_ = kDefaultDelta;
  ScalarFn a0_, a0_t_, g0_;
};

/// Supplied structure constants for check_structure_HA; fitted from the
/// samples when absent.
struct StructureConstants {
  std::optional<double> a3;  // coercivity:  A.xi >= a3/(p-1) |xi|^p
  std::optional<double> a6;  // growth:      |A| <= a6 (1 + |xi|^{p-1})
  std::optional<double> a7;  // potential:   G <= a7 (1 + |xi|^p)
};

/// Samples the structure hypotheses of the radial family: positivity of
/// A0, strict monotonicity of t A0 and of A itself, power growth and
/// coercivity with fitted constants, the potential sandwich, and the
/// convexity bound G <= A.xi. Fitted lower constants use the sampled
/// extremal ratio with a 1% safety margin; a lower bound FAILs when its
/// ratio collapses at the box edge (minimum below 1% of the median),
/// which certifies a decaying witness rather than proving the bound.
AuditReport check_structure_HA(const OperatorFamily& fam, const SampleSpec& spec,
                               const StructureConstants& supplied = {});

/// Weight profile for the regularity hypotheses: theta with claimed
/// slope bounds a1 <= t theta'/theta <= a2 and growth envelope
/// a3 t^{p-1} <= theta <= a4 (1 + t^{p-1}).
struct ThetaProfile {
  std::function<double(double)> theta;
  std::function<double(double)> theta_prime;  // finite differences if null
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
};

AuditReport check_theta_profile(const ThetaProfile& profile, double p,
                                double t_min = 1e-3, double t_max = 1e3,
                                int n = 41);

}  // namespace plab
