#include "fibernet/settings.hpp"

#include <numbers>

namespace fibernet {

ValueRange parse_range(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const double v = parse_double(text, what);
    return {v, v};
  }
  ValueRange range{parse_double(text.substr(0, colon), what),
                   parse_double(text.substr(colon + 1), what)};
  if (range.hi < range.lo)
    throw config_error("range for " + what + " has hi < lo: '" + text + "'");
  return range;
}

namespace {

ValueRange get_range(const Config& config, const std::string& key,
                     ValueRange fallback) {
  return config.has(key) ? parse_range(config.require(key), key) : fallback;
}

void read_set(const Config& config, const std::string& prefix,
              CoefficientSet& set) {
  set.k = config.get_double(prefix + "k", set.k);
  set.a = config.get_double(prefix + "a", set.a);
  set.w = config.get_double(prefix + "w", set.w);
  set.kappa = config.get_double(prefix + "kappa", set.kappa);
  set.volume = config.get_double(prefix + "volume", set.volume);
  set.eta = config.get_double(prefix + "eta", set.eta);
  set.gamma = config.get_double(prefix + "gamma", set.gamma);
}

} // namespace

NetworkSpec network_spec_from_config(const Config& config) {
  NetworkSpec spec;
  spec.type = network_type_from_name(
      config.get("network.type", network_type_name(spec.type)));
  spec.m_fine = config.get_int("network.m_fine", spec.m_fine);
  spec.domain_side = config.get_double("network.domain_side", spec.domain_side);
  spec.magnitude = config.get_double("network.magnitude", spec.magnitude);
  spec.pair_rule = pair_rule_from_name(
      config.get("network.pair_rule", pair_rule_name(spec.pair_rule)));
  spec.seed = config.get_u64("network.seed", spec.seed);
  spec.fiber.fiber_count =
      config.get_int("network.fiber_count", spec.fiber.fiber_count);
  spec.fiber.fiber_length =
      config.get_double("network.fiber_length", spec.fiber.fiber_length);
  spec.fiber.segments_per_fiber =
      config.get_int("network.segments_per_fiber", spec.fiber.segments_per_fiber);
  spec.fiber.target_nodes =
      config.get_int("network.target_nodes", spec.fiber.target_nodes);
  spec.fiber.max_bond_pairs =
      config.get_int("network.max_bond_pairs", spec.fiber.max_bond_pairs);
  spec.fiber.merge_radius =
      config.get_double("network.merge_radius", spec.fiber.merge_radius);
  return spec;
}

CoefficientScheme coefficient_scheme_from_config(const Config& config) {
  const bool fiber_net = config.get("network.type", "structured") == "fiber";
  const std::string name =
      config.get("network.scheme", fiber_net ? "fiber" : "homogeneous");
  if (name == "homogeneous") {
    HomogeneousScheme scheme;
    read_set(config, "network.", scheme.values);
    scheme.thickness = config.get_double("network.thickness", scheme.thickness);
    return scheme;
  }
  if (name == "random") {
    RandomUniformScheme scheme;
    scheme.k = get_range(config, "network.k", scheme.k);
    scheme.a = get_range(config, "network.a", scheme.a);
    scheme.w = get_range(config, "network.w", scheme.w);
    scheme.kappa = get_range(config, "network.kappa", scheme.kappa);
    scheme.volume = get_range(config, "network.volume", scheme.volume);
    scheme.eta = get_range(config, "network.eta", scheme.eta);
    scheme.gamma = get_range(config, "network.gamma", scheme.gamma);
    scheme.thickness = config.get_double("network.thickness", scheme.thickness);
    return scheme;
  }
  if (name == "fiber") {
    FiberScheme scheme;
    read_set(config, "network.intra_", scheme.intra);
    read_set(config, "network.bond_", scheme.bond);
    scheme.thickness = config.get_double("network.thickness", scheme.thickness);
    scheme.factor = get_range(config, "network.factor", scheme.factor);
    return scheme;
  }
  throw config_error("unknown coefficient scheme: '" + name + "'");
}

std::uint64_t coefficient_seed_from_config(const Config& config) {
  return config.get_u64("network.coefficient_seed", 1);
}

ProblemSpec problem_spec_from_config(const Config& config) {
  ProblemSpec spec;
  spec.kind = problem_from_name(
      config.get("assembly.problem", problem_name(spec.kind)));
  spec.force_scale = config.get_double("assembly.force_scale", spec.force_scale);
  spec.displacement_fraction = config.get_double(
      "assembly.displacement_fraction", spec.displacement_fraction);
  return spec;
}

AssemblyOptions assembly_options_from_config(const Config& config) {
  AssemblyOptions options;
  options.asymmetry_gate =
      config.get_double("assembly.asymmetry_gate", options.asymmetry_gate);
  return options;
}

StudyConfig study_config_from_config(const Config& config) {
  StudyConfig study;
  study.network = network_spec_from_config(config);
  study.scheme = coefficient_scheme_from_config(config);
  study.coefficient_seed = coefficient_seed_from_config(config);
  study.problem = problem_spec_from_config(config);
  study.m_list = config.get_int_list("analysis.m_list", study.m_list);
  study.loc_factor = config.get_double("multiscale.loc_factor", study.loc_factor);
  const std::string base = config.get("multiscale.log_base", "e");
  study.log_base =
      (base == "e" || base == "E") ? std::numbers::e
                                   : parse_double(base, "multiscale.log_base");
  study.threads = config.get_int("cli.threads", study.threads);
  study.timing = config.get_bool("analysis.timing", study.timing);
  return study;
}

} // namespace fibernet
