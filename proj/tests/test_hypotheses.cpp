#include <doctest.h>

#include <cmath>
#include <random>

#include "plab/hypotheses.hpp"
#include "plab/reactions.hpp"

using namespace plab;

TEST_CASE("critical exponents on the worked triples") {
  CHECK(*critical_exponent_domain(2.0, 3) == doctest::Approx(6.0).epsilon(1e-15));
  CHECK_FALSE(critical_exponent_domain(3.0, 2).has_value());
  CHECK(*critical_exponent_domain(1.5, 3) == doctest::Approx(3.0).epsilon(1e-15));

  CHECK(*critical_exponent_boundary(2.0, 3) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(*critical_exponent_boundary(2.0, 4) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_FALSE(critical_exponent_boundary(5.0, 4).has_value());

  CHECK_THROWS_AS(critical_exponent_domain(1.0, 3), HypothesesError);
  CHECK_THROWS_AS(critical_exponent_boundary(0.5, 3), HypothesesError);
  CHECK(format_exponent(critical_exponent_domain(3.0, 2)) == "UNBOUNDED");
}

TEST_CASE("boundary exponent is the domain exponent scaled by (N-1)/N") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(2, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const int N = dim(rng);
    std::uniform_real_distribution<double> pd(1.0 + 1e-6, N - 1e-6);
    const double p = pd(rng);
    const double ps = *critical_exponent_domain(p, N);
    const double psb = *critical_exponent_boundary(p, N);
    CHECK(std::abs(psb - ps * (N - 1) / N) <= 1e-12 * ps);
    CHECK(ps > psb);
    CHECK(psb > p);
  }
}

TEST_CASE("domain exponent is strictly increasing in p") {
  for (int N : {2, 3, 5}) {
    double prev = 0.0;
    for (double p = 1.01; p < N - 1e-9; p += (N - 1.02) / 40.0) {
      const double ps = *critical_exponent_domain(p, N);
      CHECK(ps > prev);
      prev = ps;
    }
  }
}

TEST_CASE("exponent invariants are enforced") {
  CHECK_NOTHROW(Exponents::make(2.0, 3, 6.0, 4.0));  // critical case allowed
  CHECK_THROWS_AS(Exponents::make(2.0, 3, 6.5, 4.0), HypothesesError);
  CHECK_THROWS_AS(Exponents::make(2.0, 3, 2.0, 4.5), HypothesesError);
  CHECK_THROWS_AS(Exponents::make(2.0, 3, 1.5, 2.0), HypothesesError);
  // p >= N leaves the upper bounds open
  CHECK_NOTHROW(Exponents::make(3.0, 2, 17.0, 23.0));
}

namespace {

AuditReport growth_audit(const ReactionTerm& r, const Exponents& e,
                         const GrowthConstants& c) {
  return verify_growth(r, OperatorFamily::p_laplacian(e.p), e, c,
                       SampleSpec::defaults());
}

}  // namespace

TEST_CASE("power reaction satisfies its own growth bound") {
  const auto reaction = make_reaction(power_source(1.0, 3.0), zero_flux());
  const auto exps = Exponents::make(2.0, 3, 3.0, 2.0);
  GrowthConstants consts;
  consts.b1 = 1.0;
  consts.b2 = 1.0;
  consts.b3 = 1.0;
  const auto report = growth_audit(reaction, exps, consts);
  const auto* h3 = report.find("H3");
  REQUIRE(h3 != nullptr);
  CHECK(h3->pass);
}

TEST_CASE("quadratic boundary term fails the linear growth bound") {
  const auto reaction = make_reaction(zero_source(), even_power_flux(1.0, 2.0));
  const auto exps = Exponents::make(2.0, 3, 2.0, 2.0);
  GrowthConstants consts;
  consts.c1 = 1.0;
  consts.c2 = 1.0;
  const auto report = growth_audit(reaction, exps, consts);
  const auto* h4 = report.find("H4");
  REQUIRE(h4 != nullptr);
  CHECK_FALSE(h4->pass);
  CHECK(std::abs(h4->witness.at("s")) > 1e2);
}

TEST_CASE("the power Robin term passes with q2 = p") {
  const auto reaction = make_reaction(zero_source(), robin_flux(1.0, 2.0));
  const auto exps = Exponents::make(2.0, 3, 2.0, 2.0);
  GrowthConstants consts;
  consts.c1 = 1.0;
  consts.c2 = 1.0;
  const auto report = growth_audit(reaction, exps, consts);
  const auto* h4 = report.find("H4");
  REQUIRE(h4 != nullptr);
  CHECK(h4->pass);
}

TEST_CASE("fitted constants pass when re-audited on the same samples") {
  const auto reaction =
      make_reaction(power_source(2.5, 3.0), even_power_flux(0.5, 1.5));
  const auto exps = Exponents::make(2.0, 3, 3.0, 2.5);
  const auto fitted_run = growth_audit(reaction, exps, GrowthConstants{});
  GrowthConstants fitted;
  fitted.a1 = fitted_run.find("H1")->fitted.at("a1");
  fitted.a2 = fitted.a1;
  fitted.a3 = fitted.a1;
  fitted.a5 = fitted_run.find("H2")->fitted.at("a5");
  fitted.a4 = 1.0;
  fitted.a6 = fitted.a5;
  fitted.b1 = fitted_run.find("H3")->fitted.at("b1");
  fitted.b2 = fitted.b1;
  fitted.b3 = fitted.b1;
  fitted.c1 = fitted_run.find("H4")->fitted.at("c1");
  fitted.c2 = fitted.c1;
  const auto recheck = growth_audit(reaction, exps, fitted);
  CHECK(recheck.all_pass());
}

TEST_CASE("growth audit is monotone in the constants") {
  const auto reaction = make_reaction(power_source(1.0, 3.0), zero_flux());
  const auto exps = Exponents::make(2.0, 3, 3.0, 2.0);
  GrowthConstants tight;
  tight.b1 = 1.0;
  tight.b2 = 1.0;
  tight.b3 = 1.0;
  GrowthConstants loose = tight;
  loose.b1 = 10.0;
  loose.b2 = 7.0;
  loose.b3 = 2.0;
  const auto tight_run = growth_audit(reaction, exps, tight);
  const auto loose_run = growth_audit(reaction, exps, loose);
  REQUIRE(tight_run.find("H3")->pass);
  CHECK(loose_run.find("H3")->pass);
  CHECK(loose_run.find("H3")->margin >= tight_run.find("H3")->margin);
}

TEST_CASE("boundary Hoelder audit") {
  const auto points = SampleSpec::defaults().boundary_points;

  GrowthConstants consts;
  consts.holder_L = 0.5;
  consts.holder_alpha = 1.0;
  consts.M0 = 1.0;
  const auto constant_run = verify_boundary_holder(
      [](const Vec2&, double) { return 0.5; }, consts, points);
  CHECK(constant_run.all_pass());
  CHECK(constant_run.find("holder_modulus")->fitted.at("worst_quotient") == 0.0);

  consts.holder_L = 1.0;
  consts.M0 = 2.0;
  const auto linear_run = verify_boundary_holder(
      [](const Vec2&, double s) { return s; }, consts, points);
  CHECK_FALSE(linear_run.find("uniform_bound")->pass);

  consts.holder_L = 1.0;
  consts.holder_alpha = 0.5;
  consts.M0 = 1.0;
  const auto sqrt_run = verify_boundary_holder(
      [](const Vec2&, double s) { return std::sqrt(std::abs(s)); }, consts, points);
  CHECK(sqrt_run.all_pass());
  CHECK(sqrt_run.find("holder_modulus")->fitted.at("worst_quotient") ==
        doctest::Approx(1.0).epsilon(1e-12));

  GrowthConstants missing;
  CHECK_THROWS_AS(verify_boundary_holder([](const Vec2&, double) { return 0.0; },
                                         missing, points),
                  HypothesesError);
}
