#pragma once

#include <functional>
#include <string>

#include "plab/hypotheses.hpp"
#include "plab/solver.hpp"

namespace plab {

/// Named closed-form expressions on the unit square, shared by initial
/// guesses, trace-fit sample families and manufactured data.
/// Known names: "zero", "one", "x", "y", "xy", "coscos".
std::function<double(const Vec2&)> named_expression(const std::string& name);

struct VolumeSource {
  std::function<double(const Vec2&, double, const Vec2&)> f, f_s;
  std::function<Vec2(const Vec2&, double, const Vec2&)> f_xi;
  bool is_zero = false;
  bool depends_s = false;
  bool depends_xi = false;
};

struct BoundaryFlux {
  std::function<double(const Vec2&, double)> f, f_s;
  bool is_zero = false;
};

VolumeSource zero_source();
VolumeSource constant_source(double value);
/// coef |s|^{r-2} s
VolumeSource power_source(double coef, double r);
/// x-dependent source coef * g(x)
VolumeSource field_source(double coef, std::function<double(const Vec2&)> g);

BoundaryFlux zero_flux();
BoundaryFlux constant_flux(double value);
/// -beta |s|^{r-2} s + g(x); the model boundary term with power growth
BoundaryFlux robin_flux(double beta, double r,
                        std::function<double(const Vec2&)> g = {});
/// coef |s|^e, an even term useful as a growth-audit counterexample
BoundaryFlux even_power_flux(double coef, double e);

ReactionTerm make_reaction(VolumeSource volume, BoundaryFlux boundary);

/// Manufactured problem with exact solution cos(pi x) cos(pi y): the
/// p = 2 operator, volume source 2 pi^2 cos(pi x) cos(pi y), and Robin
/// boundary term C(x,s) = -s + u_exact(x) (the exact normal derivative
/// vanishes on all four edges of the unit square).
ProblemSpec robin_laplace_cosine_problem(int nx);
double robin_laplace_cosine_exact(const Vec2& x);

/// Manufactured problem with an affine exact solution a + b x + c y for
/// any built-in family: zero volume source and
/// C(x,s) = -|s|^{p-2} s + (|u_ex|^{p-2} u_ex + A(grad u_ex).nu), where
/// the boundary data resolves the outward normal from the rectangle's
/// edges. P1 elements reproduce affine solutions exactly.
ProblemSpec affine_exact_problem(const OperatorFamily& fam, double a, double b,
                                 double c, int nx, int ny = 0,
                                 double width = 1.0, double height = 1.0);

}  // namespace plab
