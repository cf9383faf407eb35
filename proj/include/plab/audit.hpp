#pragma once

#include <map>
#include <string>
#include <vector>

#include "plab/geometry.hpp"

namespace plab {

/// Outcome of one sampled structure/growth condition. A FAIL carries a
/// witness point; a PASS is evidence on the sampled box, not a proof.
struct AuditCheck {
  std::string id;
  bool pass = false;
  double margin = 0.0;
  std::map<std::string, double> fitted;
  std::map<std::string, double> witness;
  std::string note;
};

struct AuditReport {
  std::vector<AuditCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const AuditCheck* find(const std::string& id) const {
    for (const auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
};

/// Sampling box for the audits. Hypotheses quantify over all of R^N;
/// the box is the documented scope of the certificate.
struct SampleSpec {
  std::vector<Vec2> x_points;
  std::vector<Vec2> boundary_points;
  double xi_min = 1e-3;
  double xi_max = 1e3;
  int n_xi = 25;
  int n_dir = 16;
  double s_max = 1e3;
  int n_s = 25;
  std::uint64_t seed = 0;

  /// Unit-square defaults: 4x4 interior lattice, 64 boundary points.
  static SampleSpec defaults();

  std::vector<double> xi_magnitudes() const;  // log-spaced
  std::vector<double> s_values() const;       // signed log-spaced plus 0
  std::vector<Vec2> directions() const;
};

}  // namespace plab
