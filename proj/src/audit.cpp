#include "plab/audit.hpp"

#include <cmath>

namespace plab {

SampleSpec SampleSpec::defaults() {
  SampleSpec spec;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      spec.x_points.emplace_back((i + 0.5) / 4.0, (j + 0.5) / 4.0);
    }
  }
  // 64 points around the unit square, 16 per side
  for (int k = 0; k < 16; ++k) {
    const double t = (k + 0.5) / 16.0;
    spec.boundary_points.emplace_back(t, 0.0);
    spec.boundary_points.emplace_back(1.0, t);
    spec.boundary_points.emplace_back(1.0 - t, 1.0);
    spec.boundary_points.emplace_back(0.0, 1.0 - t);
  }
  return spec;
}

std::vector<double> SampleSpec::xi_magnitudes() const {
  std::vector<double> mags;
  mags.reserve(static_cast<std::size_t>(n_xi));
  if (n_xi == 1) {
    mags.push_back(xi_min);
    return mags;
  }
  const double ratio = std::log(xi_max / xi_min) / (n_xi - 1);
  for (int k = 0; k < n_xi; ++k) mags.push_back(xi_min * std::exp(ratio * k));
  return mags;
}

std::vector<double> SampleSpec::s_values() const {
  std::vector<double> values;
  values.push_back(0.0);
  const double s_min = 1e-3;
  const int half = std::max(1, n_s / 2);
  const double ratio = half > 1 ? std::log(s_max / s_min) / (half - 1) : 0.0;
  for (int k = 0; k < half; ++k) {
    const double m = s_min * std::exp(ratio * k);
    values.push_back(m);
    values.push_back(-m);
  }
  return values;
}

std::vector<Vec2> SampleSpec::directions() const {
  std::vector<Vec2> dirs;
  dirs.reserve(static_cast<std::size_t>(n_dir));
  for (int k = 0; k < n_dir; ++k) {
    const double angle = 2.0 * M_PI * k / n_dir + 0.1;
    dirs.emplace_back(std::cos(angle), std::sin(angle));
  }
  return dirs;
}

}  // namespace plab
