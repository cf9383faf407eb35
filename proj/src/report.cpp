#include "plab/report.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace plab {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json make_report(const std::string& stage, const std::string& status,
                           const std::string& inputs_digest, nlohmann::json data) {
  return nlohmann::json{{"stage", stage},
                        {"status", status},
                        {"inputs_digest", inputs_digest},
                        {"data", std::move(data)},
                        {"timestamp", iso_timestamp()}};
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file " + path.string());
  out << doc.dump(2) << "\n";
}

nlohmann::json to_json(const AuditCheck& check) {
  nlohmann::json j{{"id", check.id},
                   {"verdict", check.pass ? "PASS" : "FAIL"},
                   {"margin", check.margin}};
  if (!check.fitted.empty()) j["fitted"] = check.fitted;
  if (!check.witness.empty()) j["witness"] = check.witness;
  if (!check.note.empty()) j["note"] = check.note;
  return j;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) checks.push_back(to_json(c));
  return nlohmann::json{{"all_pass", report.all_pass()}, {"checks", std::move(checks)}};
}

nlohmann::json to_json(const SolveReport& report) {
  return nlohmann::json{
      {"converged", report.converged},
      {"iterations", report.iterations},
      {"strategy", report.strategy},
      {"residual_history", report.residual_history},
      {"field", {{"values", std::vector<double>(report.field.values.begin(),
                                                report.field.values.end())}}}};
}

nlohmann::json to_json(const NormLadderReport& report) {
  return nlohmann::json{{"kind", to_string(report.kind)},
                        {"q_tilde", report.q_tilde},
                        {"kappa", report.kappas},
                        {"alpha", report.alphas},
                        {"log_norm", report.log_norms},
                        {"norm", report.norms()},
                        {"sup_estimate", report.sup_estimate},
                        {"direct_max", report.direct_max},
                        {"relative_gap", report.relative_gap},
                        {"dependence_norm", report.dependence_norm}};
}

nlohmann::json to_json(const TraceFitReport& report) {
  return nlohmann::json{{"p", report.p},
                        {"q_hat", report.q_hat},
                        {"epsilon", report.epsilons},
                        {"c_of_epsilon", report.c_of_eps},
                        {"c1_tilde", report.c1_tilde},
                        {"c2_tilde", report.c2_tilde},
                        {"regression_residual", report.regression_residual},
                        {"degenerate", report.degenerate},
                        {"inequality_verified", report.inequality_verified},
                        {"worst_slack", report.worst_slack}};
}

void write_ladder_csv(const std::filesystem::path& path, const NormLadderReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv file " + path.string());
  out << "kappa,alpha,log_norm,norm\n";
  char buf[160];
  for (std::size_t k = 0; k < report.alphas.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", report.kappas[k],
                  report.alphas[k], report.log_norms[k], std::exp(report.log_norms[k]));
    out << buf;
  }
}

}  // namespace plab
