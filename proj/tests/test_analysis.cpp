#include <doctest.h>

#include <cmath>
#include <random>

#include "plab/analysis.hpp"
#include "plab/reactions.hpp"

using namespace plab;

namespace {

DiscreteField constant_field(const Mesh& mesh, double c) {
  return DiscreteField(Eigen::VectorXd::Constant(mesh.node_count(), c));
}

}  // namespace

TEST_CASE("lp_norm of constants is exact on both regions") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 4, 4);
  const auto u = constant_field(mesh, 2.5);
  for (double q : {1.0, 2.0, 7.5, 40.0, 400.0}) {
    CHECK(lp_norm(mesh, u, q, Region::domain).value() ==
          doctest::Approx(2.5).epsilon(1e-12));
    CHECK(lp_norm(mesh, u, q, Region::boundary).value() ==
          doctest::Approx(2.5 * std::pow(4.0, 1.0 / q)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(lp_norm(mesh, u, 0.5, Region::domain), std::invalid_argument);
}

TEST_CASE("nodal rule reaches the hand integral of x^2 within its h^2 bound") {
  for (int n : {8, 16, 32}) {
    const Mesh mesh = structured_rectangle_mesh(1, 1, n, n);
    const auto u = interpolate(mesh, named_expression("x"));
    const double norm = lp_norm(mesh, u, 2.0, Region::domain, NormRule::nodal).value();
    const double h = 1.0 / n;
    CHECK(std::abs(norm * norm - 1.0 / 3.0) <= h * h);
  }
}

TEST_CASE("w1p_norm on the worked examples") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 8, 8);
  CHECK(w1p_norm(mesh, constant_field(mesh, 3.0), 2.0) ==
        doctest::Approx(3.0).epsilon(1e-12));

  const auto ux = interpolate(mesh, named_expression("x"));
  CHECK(w1p_norm(mesh, ux, 2.0) ==
        doctest::Approx(std::sqrt(1.0 + 1.0 / 3.0)).epsilon(1e-12));

  DiscreteField doubled(2.0 * ux.values);
  CHECK(w1p_norm(mesh, doubled, 3.0) ==
        doctest::Approx(2.0 * w1p_norm(mesh, ux, 3.0)).epsilon(1e-12));
}

TEST_CASE("sup_norms are nodal maxima with boundary below domain") {
  const Mesh tri = Mesh::from_arrays({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
  DiscreteField u(Eigen::Vector3d(-3.0, 1.0, 2.0));
  const auto [dom, bnd] = sup_norms(tri, u);
  CHECK(dom == 3.0);
  CHECK(bnd == 3.0);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  const Mesh mesh = structured_rectangle_mesh(1, 1, 6, 6);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd v(mesh.node_count());
    for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    const auto [d, b] = sup_norms(mesh, DiscreteField(v));
    CHECK(b <= d);
  }
}

TEST_CASE("tail functionals: closed form at zero, vanishing above the max") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 16, 16);
  const auto u = interpolate(mesh, named_expression("coscos"));
  const double p = 2.0;
  const int N = 3;
  const double ps = 6.0, psb = 4.0;

  const auto [H0, K0] = tail_functionals(mesh, u, p, N, 0.0, 0.0);
  const double norm_ps = lp_norm(mesh, u, ps, Region::domain, NormRule::nodal).value();
  const double norm_psb =
      lp_norm(mesh, u, psb, Region::boundary, NormRule::nodal).value();
  CHECK(H0 == doctest::Approx(std::pow(norm_ps, ps - p)).epsilon(1e-12));
  CHECK(K0 == doctest::Approx(std::pow(norm_psb, psb - p)).epsilon(1e-12));

  const auto [dom_max, bnd_max] = sup_norms(mesh, u);
  const double a_max = std::pow(dom_max, ps - p);
  const double b_max = std::pow(bnd_max, psb - p);
  const auto [Htop, Ktop] =
      tail_functionals(mesh, u, p, N, a_max * 1.000001, b_max * 1.000001);
  CHECK(Htop == 0.0);
  CHECK(Ktop == 0.0);

  double prevH = std::numeric_limits<double>::infinity();
  double prevK = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 20; ++k) {
    const double L = a_max * 1.05 * k / 19.0;
    const double G = b_max * 1.05 * k / 19.0;
    const auto [H, K] = tail_functionals(mesh, u, p, N, L, G);
    CHECK(H <= prevH * (1.0 + 1e-12));
    CHECK(K <= prevK * (1.0 + 1e-12));
    prevH = H;
    prevK = K;
  }

  CHECK_THROWS_AS(tail_functionals(mesh, u, 3.0, 2, 0.0, 0.0), HypothesesError);
}

TEST_CASE("first bootstrap ladder follows its recursion") {
  const auto k1 = ladder_part1(2.0, 3, 5);
  const std::vector<double> expect{2, 8, 26, 80, 242};
  REQUIRE(k1.size() == 5);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(k1[n] == doctest::Approx(expect[n]).epsilon(1e-12));
  }

  const auto k2 = ladder_part1(2.0, 4, 3);
  CHECK(k2[0] == doctest::Approx(1.0));
  CHECK(k2[1] == doctest::Approx(3.0));
  CHECK(k2[2] == doctest::Approx(7.0));

  CHECK(ladder_part1(1.7, 4, 1)[0] > 0.0);
  CHECK_THROWS_AS(ladder_part1(3.0, 2, 4), HypothesesError);

  // recursion residual (kappa_{n+1}+1) p = (kappa_n+1) p*
  const double p = 2.3;
  const int N = 5;
  const double ps = N * p / (N - p);
  const auto ks = ladder_part1(p, N, 8);
  for (std::size_t n = 0; n + 1 < ks.size(); ++n) {
    const double lhs = (ks[n + 1] + 1.0) * p;
    const double rhs = (ks[n] + 1.0) * ps;
    CHECK(std::abs(lhs - rhs) <= 1e-12 * rhs);
  }
}

TEST_CASE("second bootstrap ladder is the stated geometric sequence") {
  const auto ks = ladder_part2(1.0, 6.0, 4.0, 5);
  const std::vector<double> expect{2.0, 3.5, 5.75, 9.125, 14.1875};
  REQUIRE(ks.size() == 5);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(ks[n] == doctest::Approx(expect[n]).epsilon(1e-12));
  }
  for (std::size_t n = 0; n + 1 < ks.size(); ++n) {
    CHECK((ks[n + 1] + 1.0) / (ks[n] + 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  }

  // partial sums of 1/(kappa_i+1) against the geometric closed form
  double sum = 0.0;
  for (std::size_t n = 0; n < ks.size(); ++n) {
    sum += 1.0 / (ks[n] + 1.0);
    const double closed = 1.0 - std::pow(2.0 / 3.0, static_cast<double>(n + 1));
    CHECK(std::abs(sum - closed) <= 1e-12);
  }
  CHECK(sum <= 0.5 * 4.0 / (6.0 - 4.0));  // summability bound

  CHECK_THROWS_AS(ladder_part2(0.0, 6.0, 4.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(ladder_part2(1.0, 6.0, 7.0, 3), std::invalid_argument);
}

TEST_CASE("ladder weight inequality") {
  CHECK(bernoulli_check(3.0, 2.0));   // 16 >= 7
  CHECK(bernoulli_check(0.0, 5.0));   // equality
  CHECK(bernoulli_check(7.0, 1.0));   // equality
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> logk(std::log(1e-6), std::log(1e3));
  std::uniform_real_distribution<double> pd(1.0, 10.0);
  for (int trial = 0; trial < 10000; ++trial) {
    CHECK(bernoulli_check(std::exp(logk(rng)), pd(rng)));
  }
}

TEST_CASE("norm ladder on a constant field") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 8, 8);
  const auto u = constant_field(mesh, 3.0);
  const auto exps = Exponents::make(2.0, 3, 2.0, 2.0);

  const auto dom = norm_ladder(mesh, u, exps, Region::domain);
  REQUIRE_FALSE(dom.alphas.empty());
  for (std::size_t k = 0; k < dom.alphas.size(); ++k) {
    CHECK(std::exp(dom.log_norms[k]) == doctest::Approx(3.0).epsilon(1e-12));
  }
  CHECK(dom.relative_gap <= 1e-12);
  CHECK(dom.alphas.back() > 400.0);
  CHECK(dom.alphas[dom.alphas.size() - 2] <= 400.0);

  const auto bnd = norm_ladder(mesh, u, exps, Region::boundary);
  for (std::size_t k = 0; k < bnd.alphas.size(); ++k) {
    const double expected = 3.0 * std::pow(4.0, 1.0 / bnd.alphas[k]);
    CHECK(std::exp(bnd.log_norms[k]) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(bnd.relative_gap <= 0.02);
  CHECK(bnd.direct_max <= dom.direct_max);
}

TEST_CASE("ladder gap shrinks with the cap and interior peaks keep order") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 16, 16);
  const auto u = interpolate(mesh, named_expression("coscos"));
  const auto exps = Exponents::make(2.0, 3, 2.0, 2.0);

  double prev_gap = std::numeric_limits<double>::infinity();
  for (double cap : {50.0, 100.0, 200.0, 400.0}) {
    const auto rep = norm_ladder(mesh, u, exps, Region::domain, std::nullopt, cap);
    CHECK(rep.relative_gap <= prev_gap * (1.0 + 1e-12));
    prev_gap = rep.relative_gap;
  }

  // interior bump: boundary trace is identically zero
  const auto bump = interpolate(mesh, [](const Vec2& x) {
    return 16.0 * x.x() * (1.0 - x.x()) * x.y() * (1.0 - x.y());
  });
  const auto dom = norm_ladder(mesh, bump, exps, Region::domain);
  const auto bnd = norm_ladder(mesh, bump, exps, Region::boundary);
  CHECK(bnd.sup_estimate <= dom.sup_estimate + 1e-9);
  CHECK(bnd.direct_max <= dom.direct_max);
  CHECK(dom.dependence_norm > 0.0);
}

TEST_CASE("ladder is empty when the seed exponent exceeds the cap") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 4, 4);
  const auto u = constant_field(mesh, 1.0);
  const auto exps = Exponents::make(2.0, 3, 2.0, 2.0);
  // seed alpha = (p*/p) p* = 18
  const auto rep = norm_ladder(mesh, u, exps, Region::domain, std::nullopt, 10.0);
  CHECK(rep.alphas.empty());
  CHECK(rep.sup_estimate == 0.0);
}

TEST_CASE("log-domain norms survive extreme scales and obey Hoelder") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 8, 8);
  Eigen::VectorXd v(mesh.node_count());
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> logmag(std::log(1e-6), std::log(1e6));
  for (int i = 0; i < v.size(); ++i) {
    v[i] = std::exp(logmag(rng)) * (i % 2 == 0 ? 1.0 : -1.0);
  }
  const DiscreteField u(v);

  const std::vector<double> qs{1.0, 2.0, 10.0, 50.0, 400.0};
  std::vector<double> logs;
  for (double q : qs) {
    const auto n = lp_norm(mesh, u, q, Region::domain, NormRule::nodal);
    CHECK(std::isfinite(n.log));
    logs.push_back(n.log);
  }
  // |Omega| = 1: the norm scale is nondecreasing in q
  for (std::size_t a = 0; a + 1 < qs.size(); ++a) {
    CHECK(logs[a] <= logs[a + 1] + 1e-10);
  }

  // direct summation cross-check where it stays finite
  const auto u_mod = DiscreteField(v.cwiseMin(50.0).cwiseMax(-50.0));
  const double q = 4.0;
  const auto& rule = triangle_rule_nodal();
  double direct = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    for (std::size_t k = 0; k < rule.points.size(); ++k) {
      direct += 2.0 * mesh.triangle_area(t) * rule.weights[k] *
                std::pow(std::abs(field_value(mesh, u_mod, t, rule.points[k])), q);
    }
  }
  const double lse = lp_norm(mesh, u_mod, q, Region::domain, NormRule::nodal).value();
  CHECK(lse == doctest::Approx(std::pow(direct, 1.0 / q)).epsilon(1e-12));
}

TEST_CASE("trace fit reproduces the constant-field defect curve") {
  const Mesh mesh = structured_rectangle_mesh(1, 1, 16, 16);
  const auto exps = Exponents::make(2.0, 3, 2.0, 2.0);
  std::vector<double> eps;
  for (int k = 0; k <= 10; ++k) eps.push_back(std::ldexp(1.0, -k));

  const std::vector<DiscreteField> ones{constant_field(mesh, 1.0)};
  const auto rep = trace_interpolation_fit(mesh, ones, exps, 2.0, eps);
  REQUIRE(rep.c_of_eps.size() == eps.size());
  for (std::size_t k = 0; k < eps.size(); ++k) {
    CHECK(rep.c_of_eps[k] == doctest::Approx(4.0 - eps[k]).epsilon(1e-10));
  }
  CHECK(rep.inequality_verified);
  CHECK(rep.c1_tilde > 0.0);
  CHECK(rep.c2_tilde > 0.0);

  // scaling invariance of the defect quotient
  const std::vector<DiscreteField> twos{constant_field(mesh, 2.0)};
  const auto scaled = trace_interpolation_fit(mesh, twos, exps, 2.0, eps);
  for (std::size_t k = 0; k < eps.size(); ++k) {
    CHECK(scaled.c_of_eps[k] == doctest::Approx(rep.c_of_eps[k]).epsilon(1e-12));
  }

  // dominated case: epsilon large enough makes every defect nonpositive
  const auto dominated =
      trace_interpolation_fit(mesh, ones, exps, 2.0, std::vector<double>{8.0});
  CHECK(dominated.c_of_eps[0] <= 0.0);
  CHECK(dominated.degenerate);
}
