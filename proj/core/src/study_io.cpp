#include "fibernet/study_io.hpp"

#include <json.hpp>

namespace fibernet {

std::string study_csv(const StudyResult& result) {
  std::string out = "m,H,ell,rel_l2,rel_energy,wall_seconds\n";
  for (const StudyRow& row : result.rows) {
    if (!row.ok) continue;
    out += std::to_string(row.m);
    out += ',';
    out += format_full(row.H);
    out += ',';
    out += format_full(row.ell);
    out += ',';
    out += format_full(row.rel_l2);
    out += ',';
    out += format_full(row.rel_energy);
    out += ',';
    out += format_full(row.wall_seconds);
    out += '\n';
  }
  return out;
}

std::string study_metadata_json(const StudyResult& result,
                                const StudyConfig& config,
                                std::uint64_t config_hash) {
  nlohmann::json root;
  root["format_version"] = kStudyFormatVersion;
  root["slopes"] = {{"l2", result.l2_fit.slope},
                    {"energy", result.energy_fit.slope}};
  root["residual_variance"] = {{"l2", result.l2_fit.residual_variance},
                               {"energy", result.energy_fit.residual_variance}};
  root["seeds"] = {{"network", config.network.seed},
                   {"coefficients", config.coefficient_seed}};
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  root["config_hash"] = hash_hex;
  root["network"] = {{"nodes", result.network_nodes},
                     {"free_dofs", result.free_dofs}};
  root["reference_residual"] = result.reference_residual;
  int ok = 0;
  nlohmann::json failures = nlohmann::json::array();
  for (const StudyRow& row : result.rows) {
    if (row.ok)
      ++ok;
    else
      failures.push_back({{"m", row.m}, {"message", row.message}});
  }
  root["rows_ok"] = ok;
  root["rows_failed"] = std::move(failures);
  return root.dump(1);
}

} // namespace fibernet
