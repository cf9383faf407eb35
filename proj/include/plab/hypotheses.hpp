#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "plab/audit.hpp"
#include "plab/geometry.hpp"
#include "plab/operators.hpp"

namespace plab {

struct HypothesesError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Np/(N-p) for p < N; nullopt when p >= N (unbounded: any exponent in
/// (1,inf) embeds, so callers must pick their own).
std::optional<double> critical_exponent_domain(double p, int N);
/// (N-1)p/(N-p) for p < N; nullopt when p >= N.
std::optional<double> critical_exponent_boundary(double p, int N);

std::string format_exponent(const std::optional<double>& e);

/// Growth exponents of the structure conditions. N is the analytic
/// dimension parameter of the exponent formulas; it need not match the
/// 2D mesh.
struct Exponents {
  double p = 2.0;
  int N = 3;
  double q1 = 2.0;
  double q2 = 2.0;

  /// Validates p in (1,inf), N >= 2, p <= q1 <= p* and p <= q2 <= p_*.
  static Exponents make(double p, int N, double q1, double q2);

  std::optional<double> p_star() const { return critical_exponent_domain(p, N); }
  std::optional<double> p_star_boundary() const {
    return critical_exponent_boundary(p, N);
  }
};

struct GrowthConstants {
  std::optional<double> a1, a2, a3, a4, a5, a6;
  std::optional<double> b1, b2, b3;
  std::optional<double> c1, c2;
  // Hoelder block, used only by verify_boundary_holder
  std::optional<double> holder_L;
  std::optional<double> holder_alpha;
  std::optional<double> M0;
};

/// Lower-order data of the problem: volume term B(x,s,xi) and boundary
/// term C(x,s). Optional analytic derivatives; central finite
/// differences otherwise. The structural flags let the solver detect the
/// pure-Neumann degeneracy and skip vanishing blocks.
struct ReactionTerm {
  std::function<double(const Vec2&, double, const Vec2&)> b;
  std::function<double(const Vec2&, double)> c;

  std::function<double(const Vec2&, double, const Vec2&)> b_s;
  std::function<Vec2(const Vec2&, double, const Vec2&)> b_xi;
  std::function<double(const Vec2&, double)> c_s;

  bool b_is_zero = false;
  bool b_depends_s = true;
  bool b_depends_xi = true;
  bool c_is_zero = false;
};

/// Samples the growth conditions on the (x, s, xi) box of `spec`:
///   H1: |A(x,xi)|  <= a1|xi|^{p-1} + a2|s|^{q1(p-1)/p} + a3
///   H2: A(x,xi).xi >= a4|xi|^p - a5|s|^{q1} - a6
///   H3: |B(x,s,xi)| <= b1|xi|^{p(q1-1)/q1} + b2|s|^{q1-1} + b3
///   H4: |C(x,s)|   <= c1|s|^{q2-1} + c2
/// A hypothesis with all of its constants supplied is checked and FAILs
/// with a witness when violated; otherwise the minimal shared constant
/// is fitted as the sampled supremum plus a 1% margin and reported.
AuditReport verify_growth(const ReactionTerm& reaction, const OperatorFamily& fam,
                          const Exponents& exps, const GrowthConstants& consts,
                          const SampleSpec& spec);

/// Checks the uniform bound |C| <= L and the Hoelder modulus
/// |C(x,s)-C(y,t)| <= L(|x-y|^alpha + |s-t|^alpha) on sampled pairs from
/// boundary_points x [-M0, M0]. Requires L, alpha, M0 in `consts`.
AuditReport verify_boundary_holder(
    const std::function<double(const Vec2&, double)>& c,
    const GrowthConstants& consts, const std::vector<Vec2>& boundary_points);

}  // namespace plab
