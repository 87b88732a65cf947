#pragma once

#include "fibernet/analysis.hpp"

#include <cstdint>
#include <string>

namespace fibernet {

/// Header `m,H,ell,rel_l2,rel_energy,wall_seconds`, one line per successful
/// row, full-precision values. Failed rows live in the metadata file.
std::string study_csv(const StudyResult& result);

/// Fitted slopes and residual variances, seeds, config hash, row failures.
std::string study_metadata_json(const StudyResult& result,
                                const StudyConfig& config,
                                std::uint64_t config_hash);

} // namespace fibernet
