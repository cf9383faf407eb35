#include "plab/field.hpp"

namespace plab {

DiscreteField zero_field(const Mesh& mesh) {
  return DiscreteField(Eigen::VectorXd::Zero(mesh.node_count()));
}

DiscreteField interpolate(const Mesh& mesh, const std::function<double(const Vec2&)>& f) {
  Eigen::VectorXd v(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) v[i] = f(mesh.nodes()[i]);
  return DiscreteField(std::move(v));
}

double field_value(const Mesh& mesh, const DiscreteField& u, int t,
                   const std::array<double, 3>& bary) {
  const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
  return bary[0] * u.values[tri[0]] + bary[1] * u.values[tri[1]] +
         bary[2] * u.values[tri[2]];
}

Vec2 field_gradient(const Mesh& mesh, const DiscreteField& u, int t) {
  const auto& tri = mesh.triangles()[static_cast<std::size_t>(t)];
  const auto grads = mesh.p1_gradients(t);
  return u.values[tri[0]] * grads[0] + u.values[tri[1]] * grads[1] +
         u.values[tri[2]] * grads[2];
}

}  // namespace plab
