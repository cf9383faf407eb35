#include <doctest.h>

#include <cmath>

#include "plab/geometry.hpp"

using namespace plab;

namespace {

// exact integral of x^a y^b over the reference triangle (0,0),(1,0),(0,1)
double reference_monomial(int a, int b) {
  auto factorial = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

double integrate_reference(const TriangleRule& rule, int a, int b) {
  const Mesh tri = Mesh::from_arrays({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}},
                                     {{0, 1, 2}});
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    const Vec2 x = tri.point_at(0, rule.points[k]);
    sum += 2.0 * tri.triangle_area(0) * rule.weights[k] *
           std::pow(x.x(), a) * std::pow(x.y(), b);
  }
  return sum;
}

}  // namespace

TEST_CASE("structured rectangle counts") {
  const Mesh m1 = structured_rectangle_mesh(1, 1, 1, 1);
  CHECK(m1.node_count() == 4);
  CHECK(m1.triangle_count() == 2);
  CHECK(m1.boundary_edges().size() == 4);

  const Mesh m2 = structured_rectangle_mesh(1, 1, 2, 2);
  CHECK(m2.node_count() == 9);
  CHECK(m2.triangle_count() == 8);
  CHECK(m2.boundary_edges().size() == 8);

  const Mesh m3 = structured_rectangle_mesh(2, 1, 4, 2);
  CHECK(domain_measure(m3) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(boundary_measure(m3) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(m3.boundary_edges().size() == 2 * (4 + 2));
}

TEST_CASE("structured rectangle rejects bad arguments") {
  CHECK_THROWS_AS(structured_rectangle_mesh(0, 1, 2, 2), MeshError);
  CHECK_THROWS_AS(structured_rectangle_mesh(1, -1, 2, 2), MeshError);
  CHECK_THROWS_AS(structured_rectangle_mesh(1, 1, 0, 2), MeshError);
}

TEST_CASE("measures are refinement invariant") {
  for (int n : {1, 3, 7, 16}) {
    const Mesh m = structured_rectangle_mesh(2.5, 0.75, n, n + 1);
    CHECK(domain_measure(m) == doctest::Approx(2.5 * 0.75).epsilon(1e-12));
    CHECK(boundary_measure(m) == doctest::Approx(2 * (2.5 + 0.75)).epsilon(1e-12));
  }
}

TEST_CASE("boundary normals are unit, tangent-orthogonal and outward") {
  const Mesh m = structured_rectangle_mesh(1.4, 0.9, 5, 3);
  for (const auto& e : m.boundary_edges()) {
    CHECK(std::abs(e.normal.norm() - 1.0) < 1e-12);
    const Vec2 tangent = (m.nodes()[e.b] - m.nodes()[e.a]).normalized();
    CHECK(std::abs(e.normal.dot(tangent)) < 1e-12);
    const Vec2 mid = 0.5 * (m.nodes()[e.a] + m.nodes()[e.b]);
    CHECK(e.normal.dot(mid - m.triangle_centroid(e.triangle)) > 0.0);
  }
}

TEST_CASE("load_mesh parses the text format") {
  const std::string text =
      "# unit right triangle\n"
      "nodes 3\n"
      "0 0\n"
      "1 0\n"
      "0 1\n"
      "\n"
      "elements 1\n"
      "0 1 2\n";
  const Mesh m = load_mesh(text);
  CHECK(m.node_count() == 3);
  CHECK(m.boundary_edges().size() == 3);
  CHECK(domain_measure(m) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("load_mesh repairs or rejects clockwise triangles") {
  const std::string clockwise =
      "nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 2 1\n";
  const Mesh repaired = load_mesh(clockwise);
  CHECK(repaired.triangle_area(0) > 0.0);
  CHECK_THROWS_AS(load_mesh(clockwise, /*strict=*/true), MeshError);
}

TEST_CASE("load_mesh reports offending element and line") {
  const std::string dangling =
      "nodes 3\n0 0\n1 0\n0 1\nelements 1\n0 1 7\n";
  CHECK_THROWS_WITH_AS(load_mesh(dangling),
                       doctest::Contains("references node 7 of 3"), MeshError);

  const std::string garbled = "nodes 2\n0 0\nnot-a-number 1\nelements 0\n";
  CHECK_THROWS_WITH_AS(load_mesh(garbled), doctest::Contains("line 3"), MeshError);
}

TEST_CASE("from_arrays rejects non-manifold and degenerate input") {
  CHECK_THROWS_AS(Mesh::from_arrays({{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}), MeshError);
  // three triangles sharing one edge
  CHECK_THROWS_AS(Mesh::from_arrays({{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}},
                                    {{0, 1, 2}, {0, 3, 1}, {0, 1, 4}}),
                  MeshError);
}

TEST_CASE("triangle rule integrates degree <= 2 exactly") {
  const auto& rule = triangle_rule_deg2();
  double wsum = 0.0;
  for (double w : rule.weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(0.5).epsilon(1e-15));
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; a + b <= 2; ++b) {
      CHECK(integrate_reference(rule, a, b) ==
            doctest::Approx(reference_monomial(a, b)).epsilon(1e-14));
    }
  }
}

TEST_CASE("edge rule integrates degree <= 3 exactly") {
  const auto& rule = edge_rule_gauss2();
  for (int k = 0; k <= 3; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      CHECK(rule.weights[i] > 0.0);
      sum += rule.weights[i] * std::pow(rule.points[i], k);
    }
    CHECK(sum == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
}

TEST_CASE("quadrature of the constant reproduces the domain measure") {
  const Mesh m = structured_rectangle_mesh(1.7, 2.3, 6, 4);
  const auto& rule = triangle_rule_deg2();
  double total = 0.0;
  for (int t = 0; t < m.triangle_count(); ++t) {
    for (double w : rule.weights) total += 2.0 * m.triangle_area(t) * w;
  }
  CHECK(total == doctest::Approx(domain_measure(m)).epsilon(1e-12));
}
