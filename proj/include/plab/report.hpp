#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "plab/analysis.hpp"
#include "plab/audit.hpp"
#include "plab/solver.hpp"

namespace plab {

/// FNV-1a 64-bit digest, hex-encoded; fingerprints the config inside
/// every report so runs are attributable.
std::string fnv1a_hex(const std::string& text);

std::string iso_timestamp();

/// Report envelope: { stage, status, inputs_digest, data, timestamp }.
/// Keys serialize sorted, so identical inputs give byte-identical
/// documents apart from the timestamp.
nlohmann::json make_report(const std::string& stage, const std::string& status,
                           const std::string& inputs_digest, nlohmann::json data);

void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

nlohmann::json to_json(const AuditCheck& check);
nlohmann::json to_json(const AuditReport& report);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const NormLadderReport& report);
nlohmann::json to_json(const TraceFitReport& report);

/// CSV with columns kappa,alpha,log_norm,norm.
void write_ladder_csv(const std::filesystem::path& path, const NormLadderReport& report);

}  // namespace plab
