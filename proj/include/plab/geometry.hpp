#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace plab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Oriented boundary edge. Node order follows the owning triangle's CCW
/// cycle, so the outward normal is the right-hand normal of (a -> b).
struct BoundaryEdge {
  int a = -1;
  int b = -1;
  int triangle = -1;
  Vec2 normal = Vec2::Zero();
  double length = 0.0;
};

/// Triangulation of a 2D polygon. Immutable after construction and safe
/// to share across concurrent readers.
class Mesh {
public:
  /// Empty mesh; populate through from_arrays.
  Mesh() = default;

  /// Builds a mesh and establishes all invariants: CCW triangles
  /// (repaired unless `strict`), positive areas, in-range indices,
  /// manifold edge incidence, boundary edges with outward unit normals.
  /// Throws MeshError on any violation.
  static Mesh from_arrays(std::vector<Vec2> nodes,
                          std::vector<std::array<int, 3>> triangles,
                          bool strict = false);

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int triangle_count() const { return static_cast<int>(triangles_.size()); }

  double triangle_area(int t) const { return areas_[static_cast<std::size_t>(t)]; }
  Vec2 triangle_centroid(int t) const;

  /// Gradients of the three P1 hat functions on triangle t (constant vectors).
  std::array<Vec2, 3> p1_gradients(int t) const;

  /// Physical point from barycentric coordinates on triangle t.
  Vec2 point_at(int t, const std::array<double, 3>& bary) const;

  /// True if node i lies on the boundary.
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }

private:
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<double> areas_;
  std::vector<int> boundary_nodes_;  // sorted, unique
};

/// Uniform triangulation of [0,width] x [0,height] with nx-by-ny cells,
/// each split along its up-diagonal. 2(nx+ny) boundary edges.
Mesh structured_rectangle_mesh(double width, double height, int nx, int ny);

/// Parses the text mesh format:
///   nodes N
///   x y            (N lines)
///   elements M
///   i j k          (M lines, 0-based)
/// Blank lines and '#' comments are ignored. Parse errors carry the line
/// number; invariant violations name the offending element.
Mesh load_mesh(const std::string& text, bool strict = false);

double domain_measure(const Mesh& mesh);
double boundary_measure(const Mesh& mesh);

/// Quadrature on the reference triangle (barycentric points, weights
/// summing to 1/2) or the reference edge [0,1] (parametric points,
/// weights summing to 1). All weights strictly positive.
struct TriangleRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

struct EdgeRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// 3-point interior rule, exact for total degree <= 2.
const TriangleRule& triangle_rule_deg2();
/// Vertex rule, exact for degree <= 1. Used for high-exponent norms of
/// P1 fields, where it is monotone and overflow-safe.
const TriangleRule& triangle_rule_nodal();
/// 2-point Gauss rule, exact for degree <= 3.
const EdgeRule& edge_rule_gauss2();
/// Endpoint (trapezoid) rule, exact for degree <= 1.
const EdgeRule& edge_rule_nodal();

}  // namespace plab
