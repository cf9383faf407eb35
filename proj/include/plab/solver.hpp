#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "plab/field.hpp"
#include "plab/geometry.hpp"
#include "plab/hypotheses.hpp"
#include "plab/operators.hpp"

namespace plab {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolverOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_newton = 50;
  int max_picard = 200;
  double armijo_c = 1e-4;
  double min_step = 1e-4;
  /// Overrides the operator family's regularization when set.
  std::optional<double> delta;
  /// Regularization continuation: solve a ladder of descreasing deltas,
  /// warm-starting each stage. Gets degenerate operators (p > 2 at a
  /// zero initial gradient) off the ground; collapses to a single stage
  /// when the target delta is already large.
  bool continuation = true;
  double delta_start = 1.0;
  double continuation_factor = 1e-2;
};

/// Full instance of the Neumann problem: domain, leading operator,
/// lower-order data, exponents, optional constants for audits, and
/// solver controls.
struct ProblemSpec {
  Mesh mesh;
  OperatorFamily op = OperatorFamily::p_laplacian(2.0);
  ReactionTerm reaction;
  Exponents exponents;
  std::optional<GrowthConstants> constants;
  SolverOptions options;
};

/// Checks mesh/exponent/operator consistency; throws std::invalid_argument.
void validate_problem(const ProblemSpec& spec);

struct AssemblyError : std::runtime_error {
  int element = -1;
  AssemblyError(const std::string& msg, int elem)
      : std::runtime_error(msg), element(elem) {}
};

/// Weak-form residual: entry i carries
///   int_Omega A(x,grad u).grad phi_i - int_Omega B(x,u,grad u) phi_i
///   - int_bnd C(x,u) phi_i
/// over the P1 basis; a zero vector certifies a discrete weak solution.
Eigen::VectorXd assemble_residual(const ProblemSpec& spec, const DiscreteField& u);

/// Linearization of the residual. Derivatives of B and C come from the
/// reaction's analytic callbacks when present, otherwise central
/// differences with step 1e-6 (1+|s|).
SparseMatrix assemble_jacobian(const ProblemSpec& spec, const DiscreteField& u);

struct SolveReport {
  DiscreteField field;
  std::vector<double> residual_history;
  int iterations = 0;
  bool converged = false;
  std::string strategy = "newton";
};

/// Nonconvergence is an error object carrying the best iterate, never a
/// silent partial result.
struct NonConvergenceError : std::runtime_error {
  SolveReport best;
  NonConvergenceError(const std::string& msg, SolveReport report)
      : std::runtime_error(msg), best(std::move(report)) {}
};

struct SingularLinearizationError : std::runtime_error {
  SolveReport best;
  SingularLinearizationError(const std::string& msg, SolveReport report)
      : std::runtime_error(msg), best(std::move(report)) {}
};

/// Damped Newton with Armijo backtracking (halving, floor options.min_step)
/// and an automatic Picard fallback that freezes the radial coefficient
/// A0(x,|grad u_k|) while keeping the lower-order terms linearized; the
/// fallback becomes the strategy after 3 consecutive Newton line-search
/// failures. Linear solves use diagonally preconditioned CG with a
/// direct / least-squares fallback on breakdown. When C vanishes
/// identically and B has no s-dependence the linearization has the
/// constant null vector; the solve is then anchored by pinning the
/// weighted mean of the iterate to zero.
SolveReport solve(const ProblemSpec& spec, const DiscreteField& initial);

}  // namespace plab
