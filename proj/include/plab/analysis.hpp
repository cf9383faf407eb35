#pragma once

#include <optional>
#include <vector>

#include "plab/field.hpp"
#include "plab/geometry.hpp"
#include "plab/hypotheses.hpp"

namespace plab {

enum class Region { domain, boundary };
enum class NormRule { automatic, gauss, nodal };

std::string to_string(Region r);

/// A nonnegative quantity carried in the log domain so that norms with
/// exponents in the hundreds neither overflow nor underflow.
struct LogValue {
  double log = -std::numeric_limits<double>::infinity();
  double value() const { return std::exp(log); }
};

/// L^q norm of a P1 field over the domain or the boundary, accumulated
/// by log-sum-exp over quadrature points. `automatic` uses the Gauss
/// rules up to q = 20 and the nodal rule beyond, where the nodal rule is
/// monotone in q and keeps the q -> inf limit exact for P1 fields.
LogValue lp_norm(const Mesh& mesh, const DiscreteField& u, double q,
                 Region region, NormRule rule = NormRule::automatic);

/// (||grad u||_p^p + ||u||_p^p)^{1/p} with elementwise-constant gradients.
double w1p_norm(const Mesh& mesh, const DiscreteField& u, double p);

/// Nodal maxima of |u|: (domain, boundary). Exact for P1 fields; the
/// boundary maximum never exceeds the domain maximum.
std::pair<double, double> sup_norms(const Mesh& mesh, const DiscreteField& u);

/// Level-set tail functionals driving the absorption step:
///   H(L) = ( int_{a>L} a^{p*/(p*-p)} dx )^{(p*-p)/p*},  a = |u|^{p*-p}
///   K(G) analogously on the boundary with b = |u|^{p_*-p}.
/// Requires p < N. H(0) equals ||u||_{p*}^{p*-p} computed with the same
/// rule; both vanish once the threshold clears the max of the level
/// function.
std::pair<double, double> tail_functionals(const Mesh& mesh, const DiscreteField& u,
                                           double p, int N, double L, double G,
                                           NormRule rule = NormRule::nodal);

/// First bootstrap sequence: kappa_n + 1 = (p*/p)^n, n = 1..n_steps.
std::vector<double> ladder_part1(double p, int N, int n_steps);
/// Second bootstrap sequence: kappa_n + 1 = (kappa0+1) (p_star/q_tilde)^n.
std::vector<double> ladder_part2(double kappa0, double p_star, double q_tilde,
                                 int n_steps);
/// (kappa+1)^p >= kappa p + 1, the ladder-weight inequality. Compared
/// with a 4-ulp forgiving slack so equality cases stay true in floating
/// point.
bool bernoulli_check(double kappa, double p);

struct NormLadderReport {
  Region kind = Region::domain;
  std::vector<double> kappas;
  std::vector<double> alphas;
  std::vector<double> log_norms;  // log ||u||_{alpha_n}
  double q_tilde = 0.0;
  double sup_estimate = 0.0;
  double direct_max = 0.0;
  double relative_gap = 0.0;
  /// ||u||_{(pc-p) q_tilde/(q_tilde-p)} on the region, the norm the
  /// final bound may depend on.
  double dependence_norm = 0.0;

  std::vector<double> norms() const {
    std::vector<double> out;
    out.reserve(log_norms.size());
    for (double ln : log_norms) out.push_back(std::exp(ln));
    return out;
  }
};

/// Evaluates ||u||_{alpha_n} with the nodal rule along the geometric
/// exponent ladder alpha_n = (kappa_n+1) pc, pc = p* or p_*, seeded at
/// (kappa_0+1) p = pc. Rungs are evaluated in order and the ladder stops
/// with the first exponent beyond alpha_cap, which becomes the terminal
/// rung; if already the seed exceeds the cap the ladder is empty.
/// sup_estimate is the terminal norm value, not an extrapolation; the
/// gap against the exact nodal max is reported, not hidden.
NormLadderReport norm_ladder(const Mesh& mesh, const DiscreteField& u,
                             const Exponents& exps, Region kind,
                             std::optional<double> q_tilde = std::nullopt,
                             double alpha_cap = 400.0);

struct TraceFitReport {
  double p = 2.0;
  double q_hat = 2.0;
  std::vector<double> epsilons;
  std::vector<double> c_of_eps;  // max defect quotient per epsilon
  double c1_tilde = 0.0;
  double c2_tilde = 0.0;
  double regression_residual = 0.0;  // rms in log-log coordinates
  bool degenerate = false;           // all c(eps) <= 0
  bool inequality_verified = false;
  double worst_slack = 0.0;  // max of (lhs - rhs)/rhs over samples and eps
};

/// Empirical trace-interpolation constants: computes the required
/// constant c(eps) = max_u (||u||_{q_hat,bnd}^p - eps ||u||_{1,p}^p) / ||u||_p^p
/// over the sample family, fits the exponent of c1 eps^{-c2} by log-log
/// least squares over positive c(eps), and lifts c1 so the fitted curve
/// dominates every grid point. Requires p <= q_hat < p_*.
TraceFitReport trace_interpolation_fit(const Mesh& mesh,
                                       const std::vector<DiscreteField>& samples,
                                       const Exponents& exps, double q_hat,
                                       const std::vector<double>& eps_grid);

}  // namespace plab
