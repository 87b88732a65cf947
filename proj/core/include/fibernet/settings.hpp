#pragma once

#include "fibernet/analysis.hpp"
#include "fibernet/config.hpp"

namespace fibernet {

/// "lo:hi" or a single number (degenerate range).
ValueRange parse_range(const std::string& text, const std::string& what);

/// [network] keys: type, m_fine, domain_side, seed, magnitude, pair_rule,
/// fiber_count, fiber_length, segments_per_fiber, target_nodes,
/// max_bond_pairs.
NetworkSpec network_spec_from_config(const Config& config);

/// [network] keys: scheme (defaults to "fiber" for fiber networks,
/// "homogeneous" otherwise), thickness, and per scheme either scalar
/// k/a/w/kappa/volume/eta/gamma, range-valued versions of the same, or
/// intra_* / bond_* / factor.
CoefficientScheme coefficient_scheme_from_config(const Config& config);
std::uint64_t coefficient_seed_from_config(const Config& config);

/// [assembly] keys: problem (force | displace), force_scale,
/// displacement_fraction.
ProblemSpec problem_spec_from_config(const Config& config);
AssemblyOptions assembly_options_from_config(const Config& config);

/// Everything above plus [multiscale] loc_factor / log_base ("e" or a
/// number), [analysis] m_list / timing, [cli] threads.
StudyConfig study_config_from_config(const Config& config);

} // namespace fibernet
