#include "plab/reactions.hpp"

#include <cmath>

namespace plab {

namespace {

double odd_power(double s, double r) {
  // |s|^{r-2} s with the removable zero at s = 0
  return s == 0.0 ? 0.0 : std::pow(std::abs(s), r - 2.0) * s;
}

double odd_power_ds(double s, double r) {
  if (r == 2.0) return 1.0;
  return (r - 1.0) * std::pow(std::abs(s), r - 2.0);
}

}  // namespace

std::function<double(const Vec2&)> named_expression(const std::string& name) {
  if (name == "zero") return [](const Vec2&) { return 0.0; };
  if (name == "one") return [](const Vec2&) { return 1.0; };
  if (name == "x") return [](const Vec2& x) { return x.x(); };
  if (name == "y") return [](const Vec2& x) { return x.y(); };
  if (name == "xy") return [](const Vec2& x) { return x.x() * x.y(); };
  if (name == "coscos") {
    return [](const Vec2& x) { return std::cos(M_PI * x.x()) * std::cos(M_PI * x.y()); };
  }
  throw std::invalid_argument("unknown expression '" + name + "'");
}

VolumeSource zero_source() {
  VolumeSource src;
  src.is_zero = true;
  return src;
}

VolumeSource constant_source(double value) {
  VolumeSource src;
  src.f = [value](const Vec2&, double, const Vec2&) { return value; };
  return src;
}

VolumeSource power_source(double coef, double r) {
  VolumeSource src;
  src.f = [coef, r](const Vec2&, double s, const Vec2&) { return coef * odd_power(s, r); };
  src.f_s = [coef, r](const Vec2&, double s, const Vec2&) {
    return coef * odd_power_ds(s, r);
  };
  src.depends_s = true;
  return src;
}

VolumeSource field_source(double coef, std::function<double(const Vec2&)> g) {
  VolumeSource src;
  src.f = [coef, g = std::move(g)](const Vec2& x, double, const Vec2&) {
    return coef * g(x);
  };
  return src;
}

BoundaryFlux zero_flux() {
  BoundaryFlux flux;
  flux.is_zero = true;
  return flux;
}

BoundaryFlux constant_flux(double value) {
  BoundaryFlux flux;
  flux.f = [value](const Vec2&, double) { return value; };
  flux.f_s = [](const Vec2&, double) { return 0.0; };
  return flux;
}

BoundaryFlux robin_flux(double beta, double r, std::function<double(const Vec2&)> g) {
  BoundaryFlux flux;
  flux.f = [beta, r, g](const Vec2& x, double s) {
    return -beta * odd_power(s, r) + (g ? g(x) : 0.0);
  };
  flux.f_s = [beta, r](const Vec2&, double s) { return -beta * odd_power_ds(s, r); };
  return flux;
}

BoundaryFlux even_power_flux(double coef, double e) {
  BoundaryFlux flux;
  flux.f = [coef, e](const Vec2&, double s) { return coef * std::pow(std::abs(s), e); };
  flux.f_s = [coef, e](const Vec2&, double s) {
    return s == 0.0 ? 0.0 : coef * e * std::pow(std::abs(s), e - 1.0) * (s > 0 ? 1.0 : -1.0);
  };
  return flux;
}

ReactionTerm make_reaction(VolumeSource volume, BoundaryFlux boundary) {
  ReactionTerm r;
  if (!volume.is_zero && volume.f) {
    r.b = std::move(volume.f);
    r.b_s = std::move(volume.f_s);
    r.b_xi = std::move(volume.f_xi);
    r.b_depends_s = volume.depends_s;
    r.b_depends_xi = volume.depends_xi;
  } else {
    r.b_is_zero = true;
    r.b_depends_s = false;
    r.b_depends_xi = false;
  }
  if (!boundary.is_zero && boundary.f) {
    r.c = std::move(boundary.f);
    r.c_s = std::move(boundary.f_s);
  } else {
    r.c_is_zero = true;
  }
  return r;
}

ProblemSpec robin_laplace_cosine_problem(int nx) {
  ProblemSpec spec;
  spec.mesh = structured_rectangle_mesh(1.0, 1.0, nx, nx);
  spec.op = OperatorFamily::p_laplacian(2.0);
  spec.exponents = Exponents::make(2.0, 3, 2.0, 2.0);
  const auto uex = named_expression("coscos");
  spec.reaction = make_reaction(field_source(2.0 * M_PI * M_PI, uex),
                                robin_flux(1.0, 2.0, uex));
  return spec;
}

double robin_laplace_cosine_exact(const Vec2& x) {
  return std::cos(M_PI * x.x()) * std::cos(M_PI * x.y());
}

ProblemSpec affine_exact_problem(const OperatorFamily& fam, double a, double b,
                                 double c, int nx, int ny, double width,
                                 double height) {
  if (ny <= 0) ny = nx;
  const double p = fam.p();

  ProblemSpec spec;
  spec.mesh = structured_rectangle_mesh(width, height, nx, ny);
  spec.op = fam;
  const int N = std::max(2, static_cast<int>(std::floor(p)) + 1);
  spec.exponents = Exponents::make(p, N, p, p);

  // data from the exact solution u = a + b x + c y: the flux of the
  // unregularized operator is constant, so the boundary term only needs
  // the edge normal, resolved here from the rectangle's sides
  const Vec2 grad(b, c);
  const Vec2 flux = fam.with_delta(0.0).eval_A(Vec2(0.0, 0.0), grad);
  auto uex = [a, b, c](const Vec2& x) { return a + b * x.x() + c * x.y(); };
  auto g = [flux, uex, p, width, height](const Vec2& x) {
    const double tol = 1e-9 * std::max(width, height);
    Vec2 nu;
    if (std::abs(x.x()) < tol) {
      nu = Vec2(-1.0, 0.0);
    } else if (std::abs(x.x() - width) < tol) {
      nu = Vec2(1.0, 0.0);
    } else if (std::abs(x.y()) < tol) {
      nu = Vec2(0.0, -1.0);
    } else if (std::abs(x.y() - height) < tol) {
      nu = Vec2(0.0, 1.0);
    } else {
      throw std::invalid_argument("boundary point off the rectangle's edges");
    }
    const double u = uex(x);
    const double power = u == 0.0 ? 0.0 : std::pow(std::abs(u), p - 2.0) * u;
    return power + flux.dot(nu);
  };
  spec.reaction = make_reaction(zero_source(), robin_flux(1.0, p, g));
  return spec;
}

}  // namespace plab
