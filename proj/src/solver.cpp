#include "plab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

namespace plab {

namespace {

constexpr double kDivergenceGuard = 1e13;

double reaction_b(const ProblemSpec& spec, const Vec2& x, double s, const Vec2& xi) {
  return spec.reaction.b ? spec.reaction.b(x, s, xi) : 0.0;
}

double reaction_c(const ProblemSpec& spec, const Vec2& x, double s) {
  return spec.reaction.c ? spec.reaction.c(x, s) : 0.0;
}

double db_ds(const ProblemSpec& spec, const Vec2& x, double s, const Vec2& xi) {
  const auto& r = spec.reaction;
  if (!r.b || !r.b_depends_s) return 0.0;
  if (r.b_s) return r.b_s(x, s, xi);
  const double h = 1e-6 * (1.0 + std::abs(s));
  return (r.b(x, s + h, xi) - r.b(x, s - h, xi)) / (2.0 * h);
}

Vec2 db_dxi(const ProblemSpec& spec, const Vec2& x, double s, const Vec2& xi) {
  const auto& r = spec.reaction;
  if (!r.b || !r.b_depends_xi) return Vec2::Zero();
  if (r.b_xi) return r.b_xi(x, s, xi);
  Vec2 g;
  for (int k = 0; k < 2; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(xi[k]));
    Vec2 xp = xi, xm = xi;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (r.b(x, s, xp) - r.b(x, s, xm)) / (2.0 * h);
  }
  return g;
}

double dc_ds(const ProblemSpec& spec, const Vec2& x, double s) {
  const auto& r = spec.reaction;
  if (!r.c || r.c_is_zero) return 0.0;
  if (r.c_s) return r.c_s(x, s);
  const double h = 1e-6 * (1.0 + std::abs(s));
  return (r.c(x, s + h) - r.c(x, s - h)) / (2.0 * h);
}

enum class Linearization { newton, picard };

SparseMatrix assemble_matrix(const ProblemSpec& spec, const DiscreteField& u,
                             Linearization mode) {
  const Mesh& mesh = spec.mesh;
  u.require_valid(mesh);
  const auto& fam = spec.op;
  if (mode == Linearization::newton && fam.p() < 2.0 && !(fam.delta() > 0.0)) {
    throw std::invalid_argument("jacobian needs delta > 0 when p < 2");
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.triangle_count()) * 9 +
                   mesh.boundary_edges().size() * 4);

  const auto& tr = triangle_rule_deg2();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    const auto grads = mesh.p1_gradients(t);
    const Vec2 gradu = field_gradient(mesh, u, t);
    const double jac = 2.0 * mesh.triangle_area(t);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      const double w = jac * tr.weights[k];
      const Vec2 x = mesh.point_at(t, tr.points[k]);
      Mat2 D;
      if (mode == Linearization::newton) {
        D = fam.eval_jacobian(x, gradu);
      } else {
        const double td = std::hypot(gradu.norm(), fam.delta());
        const double c = td == 0.0 ? fam.eval_jacobian(x, gradu)(0, 0)
                                   : fam.coefficient(x, td);
        D = c * Mat2::Identity();
      }
      const double uval = field_value(mesh, u, t, tr.points[k]);
      const double bs = db_ds(spec, x, uval, gradu);
      const Vec2 bxi = mode == Linearization::newton
                           ? db_dxi(spec, x, uval, gradu)
                           : Vec2(Vec2::Zero());
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          double entry = w * grads[i].dot(D * grads[j]);
          entry -= w * (bs * tr.points[k][j] + bxi.dot(grads[j])) * tr.points[k][i];
          local(i, j) += entry;
        }
      }
    }
    if (!local.allFinite()) {
      throw AssemblyError("non-finite element matrix in element " + std::to_string(t), t);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) triplets.emplace_back(tri[i], tri[j], local(i, j));
  }

  const auto& er = edge_rule_gauss2();
  for (const auto& e : mesh.boundary_edges()) {
    Eigen::Matrix2d local = Eigen::Matrix2d::Zero();
    for (std::size_t k = 0; k < er.points.size(); ++k) {
      const double s = er.points[k];
      const double w = e.length * er.weights[k];
      const Vec2 x = (1.0 - s) * mesh.nodes()[e.a] + s * mesh.nodes()[e.b];
      const double uval = (1.0 - s) * u.values[e.a] + s * u.values[e.b];
      const double cs = dc_ds(spec, x, uval);
      const double shape[2] = {1.0 - s, s};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) local(i, j) -= w * cs * shape[j] * shape[i];
    }
    if (!local.allFinite()) {
      throw AssemblyError("non-finite boundary matrix on edge of element " +
                              std::to_string(e.triangle),
                          e.triangle);
    }
    const int idx[2] = {e.a, e.b};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) triplets.emplace_back(idx[i], idx[j], local(i, j));
  }

  SparseMatrix A(mesh.node_count(), mesh.node_count());
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

// Lumped node weights (support area / 3), the measure used for mean pinning.
Eigen::VectorXd lumped_weights(const Mesh& mesh) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.node_count());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    const double third = mesh.triangle_area(t) / 3.0;
    for (int k = 0; k < 3; ++k) m[tri[k]] += third;
  }
  return m;
}

struct LinearOutcome {
  Eigen::VectorXd x;
  bool ok = false;
  std::string method;
};

// Diagonally preconditioned CG; the pin vector, when present, adds the
// rank-one anchor gamma m_hat m_hat^T that removes the constant null
// space of pure-Neumann linearizations.
LinearOutcome pcg(const SparseMatrix& A, const Eigen::VectorXd& rhs,
                  const Eigen::VectorXd* pin) {
  const auto n = rhs.size();
  Eigen::VectorXd mhat;
  double gamma = 0.0;
  if (pin) {
    mhat = *pin / pin->norm();
    gamma = A.diagonal().cwiseAbs().sum() / static_cast<double>(n);
  }
  auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd out = A * v;
    if (pin) out += gamma * mhat.dot(v) * mhat;
    return out;
  };

  Eigen::VectorXd diag = A.diagonal();
  if (pin) diag += gamma * mhat.cwiseProduct(mhat);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(diag[i]) < 1e-300) diag[i] = 1.0;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd z = r.cwiseQuotient(diag);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return {x, true, "cg"};

  const int max_iter = std::max<int>(200, 4 * static_cast<int>(n));
  for (int it = 0; it < max_iter; ++it) {
    if (r.norm() <= 1e-12 * rhs_norm) return {x, true, "cg"};
    const Eigen::VectorXd Ap = apply(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0) || !std::isfinite(pAp)) break;  // breakdown
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    if (!x.allFinite()) break;
    z = r.cwiseQuotient(diag);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  if (x.allFinite() && r.norm() <= 1e-8 * rhs_norm) return {x, true, "cg"};
  return {Eigen::VectorXd(), false, "cg"};
}

LinearOutcome solve_linear(const SparseMatrix& A, const Eigen::VectorXd& rhs,
                           const Eigen::VectorXd* pin) {
  LinearOutcome cg = pcg(A, rhs, pin);
  if (cg.ok) return cg;

  const auto n = rhs.size();
  // direct path; pinned systems get the bordered Lagrange form
  {
    SparseMatrix M;
    Eigen::VectorXd b;
    if (pin) {
      std::vector<Eigen::Triplet<double>> trip;
      trip.reserve(static_cast<std::size_t>(A.nonZeros()) + 2 * n);
      for (int k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
          trip.emplace_back(it.row(), it.col(), it.value());
        }
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        trip.emplace_back(i, n, (*pin)[i]);
        trip.emplace_back(n, i, (*pin)[i]);
      }
      M.resize(n + 1, n + 1);
      M.setFromTriplets(trip.begin(), trip.end());
      b = Eigen::VectorXd::Zero(n + 1);
      b.head(n) = rhs;
    } else {
      M = A;
      b = rhs;
    }
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(M);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXd sol = lu.solve(b);
      if (sol.allFinite()) {
        Eigen::VectorXd x = pin ? Eigen::VectorXd(sol.head(n)) : sol;
        if ((A * x - rhs).norm() <= 1e-6 * std::max(1e-300, rhs.norm()) || pin) {
          return {x, true, "sparse_lu"};
        }
      }
    }
  }

  if (n <= 6000) {
    Eigen::MatrixXd dense(A);
    Eigen::VectorXd x = dense.colPivHouseholderQr().solve(rhs);
    if (x.allFinite()) return {x, true, "qr_least_squares"};
  }
  return {Eigen::VectorXd(), false, "none"};
}

double safe_residual_norm(const ProblemSpec& spec, const DiscreteField& u,
                          Eigen::VectorXd* out) {
  // Overshooting trial states may evaluate outside the data's floating
  // range; an infinite norm makes the line search back off.
  try {
    Eigen::VectorXd r = assemble_residual(spec, u);
    if (!r.allFinite()) return std::numeric_limits<double>::infinity();
    const double rn = r.norm();
    if (out) *out = std::move(r);
    return rn;
  } catch (const AssemblyError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

void validate_problem(const ProblemSpec& spec) {
  if (std::abs(spec.exponents.p - spec.op.p()) > 1e-12 * std::max(1.0, spec.op.p())) {
    throw std::invalid_argument("exponents.p must match the operator's p");
  }
  Exponents::make(spec.exponents.p, spec.exponents.N, spec.exponents.q1,
                  spec.exponents.q2);
}

Eigen::VectorXd assemble_residual(const ProblemSpec& spec, const DiscreteField& u) {
  const Mesh& mesh = spec.mesh;
  u.require_valid(mesh);
  const auto& fam = spec.op;

  Eigen::VectorXd R = Eigen::VectorXd::Zero(mesh.node_count());
  const auto& tr = triangle_rule_deg2();
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
    const auto grads = mesh.p1_gradients(t);
    const Vec2 gradu = field_gradient(mesh, u, t);
    const double jac = 2.0 * mesh.triangle_area(t);
    double local[3] = {0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < tr.points.size(); ++k) {
      const double w = jac * tr.weights[k];
      const Vec2 x = mesh.point_at(t, tr.points[k]);
      const Vec2 A = fam.eval_A(x, gradu);
      const double uval = field_value(mesh, u, t, tr.points[k]);
      const double b = reaction_b(spec, x, uval, gradu);
      for (int i = 0; i < 3; ++i) {
        local[i] += w * (A.dot(grads[i]) - b * tr.points[k][i]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      if (!std::isfinite(local[i])) {
        throw AssemblyError("non-finite integrand in element " + std::to_string(t), t);
      }
      R[tri[i]] += local[i];
    }
  }

  const auto& er = edge_rule_gauss2();
  for (const auto& e : mesh.boundary_edges()) {
    double local[2] = {0.0, 0.0};
    for (std::size_t k = 0; k < er.points.size(); ++k) {
      const double s = er.points[k];
      const double w = e.length * er.weights[k];
      const Vec2 x = (1.0 - s) * mesh.nodes()[e.a] + s * mesh.nodes()[e.b];
      const double uval = (1.0 - s) * u.values[e.a] + s * u.values[e.b];
      const double c = reaction_c(spec, x, uval);
      local[0] -= w * c * (1.0 - s);
      local[1] -= w * c * s;
    }
    if (!std::isfinite(local[0]) || !std::isfinite(local[1])) {
      throw AssemblyError("non-finite boundary integrand on edge of element " +
                              std::to_string(e.triangle),
                          e.triangle);
    }
    R[e.a] += local[0];
    R[e.b] += local[1];
  }
  return R;
}

SparseMatrix assemble_jacobian(const ProblemSpec& spec, const DiscreteField& u) {
  return assemble_matrix(spec, u, Linearization::newton);
}

SolveReport solve(const ProblemSpec& spec, const DiscreteField& initial) {
  validate_problem(spec);
  initial.require_valid(spec.mesh);
  const auto& opts = spec.options;

  ProblemSpec target = spec;
  const double delta_target = opts.delta.value_or(spec.op.delta());
  target.op = spec.op.with_delta(delta_target);

  const bool pinned = spec.reaction.c_is_zero &&
                      (!spec.reaction.b || !spec.reaction.b_depends_s);
  const Eigen::VectorXd weights = lumped_weights(spec.mesh);
  const double total_weight = weights.sum();
  auto pin_mean = [&](DiscreteField& f) {
    if (!pinned) return;
    const double mean = weights.dot(f.values) / total_weight;
    f.values.array() -= mean;
  };

  DiscreteField u = initial;
  pin_mean(u);

  SolveReport report;
  report.field = u;
  double rn0 = safe_residual_norm(target, u, nullptr);
  if (!std::isfinite(rn0)) {
    throw NonConvergenceError("initial residual is not finite", report);
  }
  report.residual_history.push_back(rn0);
  const double tol = opts.rtol * rn0 + opts.atol;

  double best_rn = rn0;
  auto update_best = [&](const DiscreteField& f, double rn) {
    if (rn <= best_rn) {
      best_rn = rn;
      report.field = f;
    }
  };

  if (rn0 <= tol) {
    report.converged = true;
    return report;
  }

  // Regularization ladder, ending exactly at the target delta.
  std::vector<double> deltas;
  if (opts.continuation && opts.delta_start > delta_target) {
    for (double d = opts.delta_start; d > delta_target; d *= opts.continuation_factor) {
      deltas.push_back(d);
    }
  }
  deltas.push_back(delta_target);

  bool picard_used = false;

  for (double delta : deltas) {
    ProblemSpec stage = spec;
    stage.op = spec.op.with_delta(delta);

    Eigen::VectorXd r;
    double rn = safe_residual_norm(stage, u, &r);
    if (!std::isfinite(rn)) {
      throw NonConvergenceError("residual lost finiteness at stage entry", report);
    }

    bool use_newton = true;
    int newton_rejects_in_row = 0;
    int newton_steps = 0;
    int picard_steps = 0;

    auto line_search = [&](const Eigen::VectorXd& d, DiscreteField& out_u,
                           Eigen::VectorXd& out_r, double& out_rn) -> bool {
      for (double alpha = 1.0; alpha >= opts.min_step; alpha *= 0.5) {
        DiscreteField trial(u.values + alpha * d);
        pin_mean(trial);
        Eigen::VectorXd tr_res;
        const double tr_rn = safe_residual_norm(stage, trial, &tr_res);
        if (tr_rn <= (1.0 - opts.armijo_c * alpha) * rn) {
          out_u = std::move(trial);
          out_r = std::move(tr_res);
          out_rn = tr_rn;
          return true;
        }
      }
      return false;
    };

    auto direction = [&](Linearization mode) -> Eigen::VectorXd {
      const SparseMatrix M = assemble_matrix(stage, u, mode);
      const LinearOutcome lin = solve_linear(M, -r, pinned ? &weights : nullptr);
      if (!lin.ok) {
        throw SingularLinearizationError("linear solve failed in every path", report);
      }
      return lin.x;
    };

    while (rn > tol) {
      if (u.values.cwiseAbs().maxCoeff() > kDivergenceGuard) {
        throw NonConvergenceError("iterate diverged", report);
      }
      if (use_newton && newton_steps >= opts.max_newton) use_newton = false;
      if (picard_steps > opts.max_picard) {
        throw NonConvergenceError("iteration budget exhausted", report);
      }

      bool accepted = false;
      if (use_newton) {
        DiscreteField next;
        Eigen::VectorXd next_r;
        double next_rn = 0.0;
        if (line_search(direction(Linearization::newton), next, next_r, next_rn)) {
          u = std::move(next);
          r = std::move(next_r);
          rn = next_rn;
          ++newton_steps;
          ++report.iterations;
          newton_rejects_in_row = 0;
          accepted = true;
          report.residual_history.push_back(rn);
          update_best(u, rn);
        } else {
          ++newton_rejects_in_row;
          if (newton_rejects_in_row >= 3) use_newton = false;
        }
      }

      if (!accepted) {
        DiscreteField next;
        Eigen::VectorXd next_r;
        double next_rn = 0.0;
        if (!line_search(direction(Linearization::picard), next, next_r, next_rn)) {
          throw NonConvergenceError(
              "line search failed for both Newton and Picard directions", report);
        }
        u = std::move(next);
        r = std::move(next_r);
        rn = next_rn;
        ++picard_steps;
        ++report.iterations;
        picard_used = true;
        report.residual_history.push_back(rn);
        update_best(u, rn);
      }
    }
  }

  // re-check against the target operator, independent of the loop above
  const double final_rn = safe_residual_norm(target, u, nullptr);
  if (!(final_rn <= tol)) {
    report.field = u;
    throw NonConvergenceError("stage ladder finished above tolerance", report);
  }
  report.field = u;
  report.converged = true;
  report.strategy = picard_used ? "picard" : "newton";
  return report;
}

}  // namespace plab
