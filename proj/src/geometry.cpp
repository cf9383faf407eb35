#include "plab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace plab {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

Mesh Mesh::from_arrays(std::vector<Vec2> nodes,
                       std::vector<std::array<int, 3>> triangles,
                       bool strict) {
  const int n = static_cast<int>(nodes.size());
  if (n < 3) throw MeshError("mesh needs at least 3 nodes");
  for (const auto& p : nodes) {
    if (!p.allFinite()) throw MeshError("non-finite node coordinate");
  }

  for (std::size_t t = 0; t < triangles.size(); ++t) {
    auto& tri = triangles[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= n) {
        throw MeshError("element " + std::to_string(t) + " references node " +
                        std::to_string(tri[k]) + " of " + std::to_string(n));
      }
    }
    const double area = signed_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
    if (area == 0.0) {
      throw MeshError("element " + std::to_string(t) + " has zero area");
    }
    if (area < 0.0) {
      if (strict) {
        throw MeshError("element " + std::to_string(t) + " is clockwise (strict mode)");
      }
      std::swap(tri[1], tri[2]);  // repair orientation
    }
  }

  Mesh mesh;
  mesh.nodes_ = std::move(nodes);
  mesh.triangles_ = std::move(triangles);

  mesh.areas_.reserve(mesh.triangles_.size());
  for (const auto& tri : mesh.triangles_) {
    mesh.areas_.push_back(
        signed_area(mesh.nodes_[tri[0]], mesh.nodes_[tri[1]], mesh.nodes_[tri[2]]));
  }

  // Edge incidence: boundary edges appear in exactly one triangle.
  std::map<std::pair<int, int>, int> incidence;
  for (const auto& tri : mesh.triangles_) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      auto key = std::minmax(a, b);
      ++incidence[{key.first, key.second}];
    }
  }
  for (const auto& [edge, count] : incidence) {
    if (count > 2) {
      throw MeshError("edge (" + std::to_string(edge.first) + "," +
                      std::to_string(edge.second) + ") shared by " +
                      std::to_string(count) + " triangles");
    }
  }

  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      auto key = std::minmax(a, b);
      if (incidence[{key.first, key.second}] != 1) continue;
      BoundaryEdge e;
      e.a = a;
      e.b = b;
      e.triangle = t;
      const Vec2 tangent = mesh.nodes_[b] - mesh.nodes_[a];
      e.length = tangent.norm();
      e.normal = Vec2(tangent.y(), -tangent.x()) / e.length;
      // CCW cycle keeps the interior on the left, so the right-hand
      // normal points outward; verify against the centroid anyway.
      const Vec2 mid = 0.5 * (mesh.nodes_[a] + mesh.nodes_[b]);
      if (e.normal.dot(mid - mesh.triangle_centroid(t)) <= 0.0) {
        throw MeshError("inward normal on boundary edge of element " + std::to_string(t));
      }
      mesh.boundary_edges_.push_back(e);
    }
  }

  for (const auto& e : mesh.boundary_edges_) {
    mesh.boundary_nodes_.push_back(e.a);
    mesh.boundary_nodes_.push_back(e.b);
  }
  std::sort(mesh.boundary_nodes_.begin(), mesh.boundary_nodes_.end());
  mesh.boundary_nodes_.erase(
      std::unique(mesh.boundary_nodes_.begin(), mesh.boundary_nodes_.end()),
      mesh.boundary_nodes_.end());

  return mesh;
}

Vec2 Mesh::triangle_centroid(int t) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  return (nodes_[tri[0]] + nodes_[tri[1]] + nodes_[tri[2]]) / 3.0;
}

std::array<Vec2, 3> Mesh::p1_gradients(int t) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  const Vec2& a = nodes_[tri[0]];
  const Vec2& b = nodes_[tri[1]];
  const Vec2& c = nodes_[tri[2]];
  const double inv2A = 1.0 / (2.0 * triangle_area(t));
  // grad(lambda_i) is the inward-rotated opposite edge over twice the area
  return {Vec2(b.y() - c.y(), c.x() - b.x()) * inv2A,
          Vec2(c.y() - a.y(), a.x() - c.x()) * inv2A,
          Vec2(a.y() - b.y(), b.x() - a.x()) * inv2A};
}

Vec2 Mesh::point_at(int t, const std::array<double, 3>& bary) const {
  const auto& tri = triangles_[static_cast<std::size_t>(t)];
  return bary[0] * nodes_[tri[0]] + bary[1] * nodes_[tri[1]] + bary[2] * nodes_[tri[2]];
}

Mesh structured_rectangle_mesh(double width, double height, int nx, int ny) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw MeshError("structured_rectangle_mesh: dimensions must be positive");
  }
  if (nx < 1 || ny < 1) {
    throw MeshError("structured_rectangle_mesh: subdivision counts must be >= 1");
  }

  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      nodes.emplace_back(width * i / nx, height * j / ny);
    }
  }

  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j);
      const int v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      tris.push_back({v00, v10, v11});
      tris.push_back({v00, v11, v01});
    }
  }
  return Mesh::from_arrays(std::move(nodes), std::move(tris));
}

Mesh load_mesh(const std::string& text, bool strict) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream probe(line);
      std::string tok;
      if (probe >> tok) {
        out = line;
        return true;
      }
    }
    return false;
  };

  auto fail = [&](const std::string& msg) -> MeshError {
    return MeshError("mesh parse error at line " + std::to_string(lineno) + ": " + msg);
  };

  std::string current;
  if (!next_line(current)) throw fail("missing 'nodes N' header");
  std::istringstream hdr(current);
  std::string word;
  long count = 0;
  if (!(hdr >> word >> count) || word != "nodes" || count < 0) {
    throw fail("expected 'nodes N'");
  }

  std::vector<Vec2> nodes;
  nodes.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    if (!next_line(current)) throw fail("expected node coordinates");
    std::istringstream row(current);
    double x = 0, y = 0;
    if (!(row >> x >> y)) throw fail("expected 'x y'");
    nodes.emplace_back(x, y);
  }

  if (!next_line(current)) throw fail("missing 'elements M' header");
  std::istringstream ehdr(current);
  if (!(ehdr >> word >> count) || word != "elements" || count < 0) {
    throw fail("expected 'elements M'");
  }

  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    if (!next_line(current)) throw fail("expected element indices");
    std::istringstream row(current);
    int a = 0, b = 0, c = 0;
    if (!(row >> a >> b >> c)) throw fail("expected 'i j k'");
    tris.push_back({a, b, c});
  }

  return Mesh::from_arrays(std::move(nodes), std::move(tris), strict);
}

double domain_measure(const Mesh& mesh) {
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) total += mesh.triangle_area(t);
  return total;
}

double boundary_measure(const Mesh& mesh) {
  double total = 0.0;
  for (const auto& e : mesh.boundary_edges()) total += e.length;
  return total;
}

const TriangleRule& triangle_rule_deg2() {
  static const TriangleRule rule{
      {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}},
       {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}},
       {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}},
      {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0}};
  return rule;
}

const TriangleRule& triangle_rule_nodal() {
  static const TriangleRule rule{
      {{{1.0, 0.0, 0.0}}, {{0.0, 1.0, 0.0}}, {{0.0, 0.0, 1.0}}},
      {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0}};
  return rule;
}

const EdgeRule& edge_rule_gauss2() {
  static const double g = 1.0 / (2.0 * std::sqrt(3.0));
  static const EdgeRule rule{{0.5 - g, 0.5 + g}, {0.5, 0.5}};
  return rule;
}

const EdgeRule& edge_rule_nodal() {
  static const EdgeRule rule{{0.0, 1.0}, {0.5, 0.5}};
  return rule;
}

}  // namespace plab
