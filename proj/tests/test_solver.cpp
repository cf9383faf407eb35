#include <doctest.h>

#include <cmath>
#include <random>

#include "plab/analysis.hpp"
#include "plab/reactions.hpp"
#include "plab/solver.hpp"

using namespace plab;

namespace {

ProblemSpec plain_spec(int nx, OperatorFamily fam, ReactionTerm reaction) {
  ProblemSpec spec;
  spec.mesh = structured_rectangle_mesh(1, 1, nx, nx);
  spec.op = fam;
  const double p = fam.p();
  const int N = std::max(2, static_cast<int>(std::floor(p)) + 1);
  spec.exponents = Exponents::make(p, N, p, p);
  spec.reaction = std::move(reaction);
  return spec;
}

double l2_error_vs(const Mesh& mesh, const DiscreteField& u,
                   const std::function<double(const Vec2&)>& exact) {
  // 6-point degree-4 rule keeps the error measurement independent of the
  // assembly quadrature
  static const std::vector<std::array<double, 3>> pts = {
      {{0.816847572980459, 0.091576213509771, 0.091576213509771}},
      {{0.091576213509771, 0.816847572980459, 0.091576213509771}},
      {{0.091576213509771, 0.091576213509771, 0.816847572980459}},
      {{0.108103018168070, 0.445948490915965, 0.445948490915965}},
      {{0.445948490915965, 0.108103018168070, 0.445948490915965}},
      {{0.445948490915965, 0.445948490915965, 0.108103018168070}}};
  static const std::vector<double> wts = {
      0.054975871827661, 0.054975871827661, 0.054975871827661,
      0.111690794839005, 0.111690794839005, 0.111690794839005};
  double sum = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Vec2 x = mesh.point_at(t, pts[k]);
      const double diff = field_value(mesh, u, t, pts[k]) - exact(x);
      sum += 2.0 * mesh.triangle_area(t) * wts[k] * diff * diff;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

TEST_CASE("constants solve the homogeneous Neumann problem exactly") {
  const auto spec =
      plain_spec(4, OperatorFamily::p_laplacian(2.0), make_reaction(zero_source(), zero_flux()));
  const DiscreteField u(Eigen::VectorXd::Constant(spec.mesh.node_count(), 4.2));
  CHECK(assemble_residual(spec, u).norm() == 0.0);
}

TEST_CASE("unit source residual is the negative basis integral") {
  const auto spec =
      plain_spec(3, OperatorFamily::p_laplacian(2.0),
                 make_reaction(constant_source(1.0), zero_flux()));
  const auto r = assemble_residual(spec, zero_field(spec.mesh));

  Eigen::VectorXd support = Eigen::VectorXd::Zero(spec.mesh.node_count());
  for (int t = 0; t < spec.mesh.triangle_count(); ++t) {
    for (int i : spec.mesh.triangles()[t]) support[i] += spec.mesh.triangle_area(t);
  }
  for (int i = 0; i < r.size(); ++i) {
    CHECK(r[i] == doctest::Approx(-support[i] / 3.0).epsilon(1e-13));
  }
  CHECK(r.sum() == doctest::Approx(-domain_measure(spec.mesh)).epsilon(1e-13));
}

TEST_CASE("residual at the exact interpolant shrinks under refinement") {
  double prev = std::numeric_limits<double>::infinity();
  for (int nx : {8, 16, 32}) {
    const auto spec = robin_laplace_cosine_problem(nx);
    const auto u = interpolate(spec.mesh, robin_laplace_cosine_exact);
    const double rn = assemble_residual(spec, u).norm();
    CHECK(rn > 0.0);
    CHECK(rn < prev / 1.5);
    prev = rn;
  }
}

TEST_CASE("p = 2 jacobian is independent of the iterate") {
  const auto spec = robin_laplace_cosine_problem(4);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v1(spec.mesh.node_count()), v2(spec.mesh.node_count());
  for (int i = 0; i < v1.size(); ++i) {
    v1[i] = gauss(rng);
    v2[i] = gauss(rng);
  }
  const Eigen::MatrixXd J1(assemble_jacobian(spec, DiscreteField(v1)));
  const Eigen::MatrixXd J2(assemble_jacobian(spec, DiscreteField(v2)));
  CHECK((J1 - J2).cwiseAbs().maxCoeff() < 1e-12 * J1.cwiseAbs().maxCoeff());
}

TEST_CASE("state-independent sources contribute nothing to the jacobian") {
  auto with_source =
      plain_spec(4, OperatorFamily::p_laplacian(2.0),
                 make_reaction(field_source(3.0, named_expression("xy")), zero_flux()));
  auto without =
      plain_spec(4, OperatorFamily::p_laplacian(2.0), make_reaction(zero_source(), zero_flux()));
  const auto u = interpolate(with_source.mesh, named_expression("coscos"));
  const Eigen::MatrixXd J1(assemble_jacobian(with_source, u));
  const Eigen::MatrixXd J2(assemble_jacobian(without, u));
  CHECK((J1 - J2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jacobian matches directional differences of the residual") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  const std::vector<OperatorFamily> families{
      OperatorFamily::p_laplacian(2.0), OperatorFamily::p_laplacian(4.0),
      OperatorFamily::mean_curvature(3.0)};
  for (const auto& fam : families) {
    for (int draw = 0; draw < 10; ++draw) {
      // smooth power reaction and Robin term keep the linearization exact
      auto spec = plain_spec(4, fam,
                             make_reaction(power_source(0.7, 4.0), robin_flux(1.0, 4.0)));
      Eigen::VectorXd v(spec.mesh.node_count()), w(spec.mesh.node_count());
      for (int i = 0; i < v.size(); ++i) {
        v[i] = 0.5 + 0.3 * gauss(rng);
        w[i] = gauss(rng);
      }
      const DiscreteField u(v);
      const double eps = 1e-6;
      const Eigen::VectorXd r0 = assemble_residual(spec, u);
      const Eigen::VectorXd r1 =
          assemble_residual(spec, DiscreteField(v + eps * w));
      const Eigen::VectorXd fd = (r1 - r0) / eps;
      const Eigen::VectorXd Jw = assemble_jacobian(spec, u) * w;
      CHECK((fd - Jw).norm() <= 1e-5 * std::max(Jw.norm(), 1e-12));
    }
  }
}

TEST_CASE("finite-difference reaction derivatives match the analytic path") {
  auto analytic = plain_spec(3, OperatorFamily::p_laplacian(2.0),
                             make_reaction(power_source(1.3, 3.0), robin_flux(0.8, 3.0)));
  auto fd = analytic;
  fd.reaction.b_s = nullptr;
  fd.reaction.c_s = nullptr;
  const auto u = interpolate(analytic.mesh, named_expression("coscos"));
  const Eigen::MatrixXd Ja(assemble_jacobian(analytic, u));
  const Eigen::MatrixXd Jf(assemble_jacobian(fd, u));
  CHECK((Ja - Jf).cwiseAbs().maxCoeff() <= 1e-8 * Ja.cwiseAbs().maxCoeff());
}

TEST_CASE("jacobian is symmetric without gradient coupling") {
  auto spec = plain_spec(5, OperatorFamily::p_laplacian(4.0),
                         make_reaction(power_source(-1.0, 3.0), robin_flux(1.0, 4.0)));
  const auto u = interpolate(spec.mesh, [](const Vec2& x) {
    return 0.3 + x.x() - 0.5 * x.y() * x.y();
  });
  const Eigen::MatrixXd J(assemble_jacobian(spec, u));
  CHECK((J - J.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * J.cwiseAbs().maxCoeff());
}

TEST_CASE("jacobian requires regularization below p = 2") {
  auto spec = plain_spec(2, OperatorFamily::p_laplacian(1.5, 0.0),
                         make_reaction(zero_source(), robin_flux(1.0, 1.5)));
  CHECK_THROWS_AS(assemble_jacobian(spec, zero_field(spec.mesh)),
                  std::invalid_argument);
}

TEST_CASE("zero data returns the zero solution immediately") {
  auto spec = plain_spec(4, OperatorFamily::p_laplacian(3.0),
                         make_reaction(zero_source(), robin_flux(1.0, 3.0)));
  const auto report = solve(spec, zero_field(spec.mesh));
  CHECK(report.converged);
  CHECK(report.iterations == 0);
  CHECK(report.field.values.norm() == 0.0);
  CHECK(report.strategy == "newton");
}

TEST_CASE("manufactured Robin problem converges in few Newton steps") {
  const auto spec = robin_laplace_cosine_problem(8);
  const auto report = solve(spec, zero_field(spec.mesh));
  CHECK(report.converged);
  CHECK(report.iterations <= 5);
  CHECK(report.strategy == "newton");
  const double err = l2_error_vs(spec.mesh, report.field, robin_laplace_cosine_exact);
  CHECK(err < 0.05);
  // converged solutions satisfy the residual tolerance independently
  const double rn = assemble_residual(spec, report.field).norm();
  CHECK(rn <= spec.options.rtol * report.residual_history.front() + spec.options.atol);
}

TEST_CASE("P1 reproduces affine solutions exactly across families") {
  struct Case {
    OperatorFamily fam;
    double a, b, c;
  };
  const std::vector<Case> cases{
      {OperatorFamily::p_laplacian(4.0), 0.0, 1.0, 0.0},
      {OperatorFamily::p_laplacian(3.0), 1.0, 2.0, -3.0},
      {OperatorFamily::mean_curvature(3.0), -0.5, 0.75, 0.25},
      {OperatorFamily::pq_laplacian(3.0, 2.0, 0.5), 0.2, -1.0, 0.4},
  };
  for (const auto& tc : cases) {
    auto spec = affine_exact_problem(tc.fam, tc.a, tc.b, tc.c, 8);
    spec.options.rtol = 1e-12;
    spec.options.atol = 1e-13;
    const auto report = solve(spec, zero_field(spec.mesh));
    CHECK(report.converged);
    const auto exact = interpolate(spec.mesh, [&](const Vec2& x) {
      return tc.a + tc.b * x.x() + tc.c * x.y();
    });
    const double err =
        (report.field.values - exact.values).cwiseAbs().maxCoeff();
    CHECK(err <= 1e-8);
  }
}

TEST_CASE("pure-Neumann compatibility pins the mean") {
  // -div grad u = 2 pi^2 cos cos has mean-zero data and solution
  auto spec = plain_spec(
      8, OperatorFamily::p_laplacian(2.0),
      make_reaction(field_source(2.0 * M_PI * M_PI, named_expression("coscos")),
                    zero_flux()));
  const auto report = solve(spec, zero_field(spec.mesh));
  CHECK(report.converged);
  const double err = l2_error_vs(spec.mesh, report.field, named_expression("coscos"));
  CHECK(err < 0.05);
}

TEST_CASE("incompatible pure-Neumann data raises nonconvergence with history") {
  auto spec = plain_spec(3, OperatorFamily::p_laplacian(2.0),
                         make_reaction(constant_source(1.0), zero_flux()));
  spec.options.max_newton = 8;
  spec.options.max_picard = 8;
  try {
    solve(spec, zero_field(spec.mesh));
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.best.residual_history.size() >= 1);
    CHECK_FALSE(e.best.converged);
    CHECK(e.best.field.size() == spec.mesh.node_count());
  }
}

TEST_CASE("problem validation rejects inconsistent exponents") {
  auto spec = plain_spec(2, OperatorFamily::p_laplacian(3.0),
                         make_reaction(zero_source(), zero_flux()));
  spec.exponents = Exponents::make(2.0, 3, 2.0, 2.0);  // p mismatch
  CHECK_THROWS_AS(solve(spec, zero_field(spec.mesh)), std::invalid_argument);
}
