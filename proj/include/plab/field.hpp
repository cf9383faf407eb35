#pragma once

#include <functional>

#include <Eigen/Dense>

#include "plab/geometry.hpp"

namespace plab {

/// Nodal coefficients of a continuous piecewise-affine function on a
/// mesh; gradients are constant per element.
struct DiscreteField {
  Eigen::VectorXd values;

  DiscreteField() = default;
  explicit DiscreteField(Eigen::VectorXd v) : values(std::move(v)) {}

  int size() const { return static_cast<int>(values.size()); }

  void require_valid(const Mesh& mesh) const {
    if (size() != mesh.node_count()) {
      throw std::invalid_argument("field size does not match mesh node count");
    }
    if (!values.allFinite()) {
      throw std::invalid_argument("field has non-finite entries");
    }
  }
};

DiscreteField zero_field(const Mesh& mesh);
DiscreteField interpolate(const Mesh& mesh, const std::function<double(const Vec2&)>& f);

/// Value of the field at a barycentric point of triangle t.
double field_value(const Mesh& mesh, const DiscreteField& u, int t,
                   const std::array<double, 3>& bary);
/// Constant gradient of the field on triangle t.
Vec2 field_gradient(const Mesh& mesh, const DiscreteField& u, int t);

}  // namespace plab
