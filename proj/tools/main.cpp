// Command-line front end: generate / solve / study / info.
//
// Every knob lives in a flat INI-style config (sections mirror the library
// modules); command-line flags override config keys. All outputs of a
// command are listed in a manifest that is written last, so a manifest's
// existence marks a completed run.

#include "fibernet/analysis.hpp"
#include "fibernet/config.hpp"
#include "fibernet/export.hpp"
#include "fibernet/lod.hpp"
#include "fibernet/network_io.hpp"
#include "fibernet/settings.hpp"
#include "fibernet/solver.hpp"
#include "fibernet/study_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using fibernet::Config;
using json = nlohmann::json;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

void log_line(const std::string& message) {
  std::cerr << "fibernet: " << message << "\n";
}

json config_json(const Config& config) {
  json params = json::object();
  for (const auto& [key, value] : config.entries()) params[key] = value;
  return params;
}

void write_manifest(const std::string& command, const Config& config,
                    const std::vector<std::string>& artifacts,
                    const std::string& path) {
  json manifest;
  manifest["command"] = command;
  manifest["parameters"] = config_json(config);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config.hash()));
  manifest["config_hash"] = hash;
  manifest["artifacts"] = artifacts;
  manifest["network_format_version"] = fibernet::kNetworkFormatVersion;
  fibernet::write_text_file(manifest.dump(1) + "\n", path);
}

// Flag values land in the config store so that precedence (flag > config
// key > default) holds uniformly and the manifest records resolved values.
class Overrides {
public:
  explicit Overrides(Config& config) : config_(config) {}

  void add_string(CLI::App* cmd, const std::string& flag, const std::string& key,
                  const std::string& help) {
    auto value = std::make_shared<std::string>();
    auto* opt = cmd->add_option(flag, *value, help);
    pending_.push_back([this, value, opt, key] {
      if (opt->count() > 0) config_.set(key, *value);
    });
  }

  void apply() const {
    for (const auto& fn : pending_) fn();
  }

private:
  Config& config_;
  std::vector<std::function<void()>> pending_;
};

int resolve_threads(const Config& config) {
  if (config.has("cli.threads")) return config.get_int("cli.threads", 0);
  if (const char* env = std::getenv("FIBERNET_THREADS"))
    return static_cast<int>(std::strtol(env, nullptr, 10));
  return 0;
}

fibernet::Network load_network(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw fibernet::io_error("network file not found: " + path);
  return fibernet::read_network(path);
}

json solution_json(const std::string& method, const std::string& problem,
                   const Eigen::VectorXd& u) {
  json out;
  out["format_version"] = fibernet::kSystemFormatVersion;
  out["method"] = method;
  out["problem"] = problem;
  out["dof_count"] = u.size();
  json values = json::array();
  for (int i = 0; i < u.size(); ++i) values.push_back(u[i]);
  out["u"] = std::move(values);
  return out;
}

int cmd_generate(const Config& config) {
  const Timer timer;
  const fibernet::NetworkSpec spec = fibernet::network_spec_from_config(config);
  const fibernet::CoefficientScheme scheme =
      fibernet::coefficient_scheme_from_config(config);

  fibernet::Network net = fibernet::build_network(spec);
  fibernet::assign_coefficients(net, scheme,
                                fibernet::coefficient_seed_from_config(config));

  const std::string out = config.get("cli.network_file", "network.json");
  fibernet::write_network(net, out);
  log_line("generated " + net.generator + " network: " +
           std::to_string(net.node_count()) + " nodes, " +
           std::to_string(net.edges.size()) + " edges, " +
           std::to_string(net.pairs.size()) + " pairs (" +
           std::to_string(timer.seconds()) + "s)");
  write_manifest("generate", config, {out}, out + ".manifest.json");
  return 0;
}

int cmd_solve(const Config& config) {
  const Timer timer;
  const std::string network_path = config.get("cli.network_file", "network.json");
  const fibernet::Network net = load_network(network_path);

  fibernet::StiffnessSystem system =
      fibernet::assemble_stiffness(net, fibernet::assembly_options_from_config(config));
  const fibernet::ProblemSpec problem = fibernet::problem_spec_from_config(config);
  fibernet::build_problem(net, system, problem);

  const std::string method = config.get("cli.method", "exact");
  const std::string out = config.get("cli.solution_file", "solution.json");
  std::vector<std::string> artifacts{out};

  Eigen::VectorXd u;
  if (method == "exact") {
    const fibernet::ReferenceSolution reference = fibernet::solve_reference(system);
    log_line("exact solve: " + std::to_string(system.free.size()) +
             " free dofs, residual " + std::to_string(reference.residual));
    u = reference.u;
  } else if (method == "lod") {
    const fibernet::StudyConfig study = fibernet::study_config_from_config(config);
    const int m = config.get_int("multiscale.m", 8);
    const double H = net.domain_side / m;
    const double ell =
        fibernet::localization_radius(H, m, study.loc_factor, study.log_base);
    const auto free_mask = system.free_mask();
    const fibernet::CoarseGrid grid = fibernet::build_coarse_grid(net, m);
    const fibernet::ShapeMatrix shape = fibernet::evaluate_shape_functions(grid, net);
    const fibernet::CoarseSpace space = fibernet::restrict_to_free(shape, free_mask);
    const fibernet::MultiscaleBasis basis = fibernet::build_multiscale_basis(
        net, grid, space, system.K, free_mask, ell, resolve_threads(config));
    const fibernet::MultiscaleSolution solution =
        fibernet::solve_multiscale(system, basis);
    log_line("lod solve: m=" + std::to_string(m) + ", ell=" + std::to_string(ell) +
             ", " + std::to_string(space.coarse_dim()) + " coarse dofs");
    u = solution.u;
    if (config.has("cli.basis_file")) {
      const std::string basis_path = config.require("cli.basis_file");
      fibernet::write_coo_file(basis.psi, basis_path);
      artifacts.push_back(basis_path);
    }
  } else {
    throw fibernet::config_error("unknown method '" + method +
                                 "' (expected exact or lod)");
  }

  fibernet::write_text_file(
      solution_json(method, fibernet::problem_name(problem.kind), u).dump(1) + "\n",
      out);
  log_line("solution written to " + out + " (" + std::to_string(timer.seconds()) +
           "s)");
  write_manifest("solve", config, artifacts, out + ".manifest.json");
  return 0;
}

int cmd_study(const Config& config) {
  const Timer timer;
  fibernet::StudyConfig study = fibernet::study_config_from_config(config);
  study.threads = resolve_threads(config);

  const fibernet::StudyResult result = fibernet::run_study(study);

  const std::string prefix = config.get("cli.study_prefix", "study");
  const std::string csv_path = prefix + ".csv";
  const std::string meta_path = prefix + ".meta.json";
  fibernet::write_text_file(fibernet::study_csv(result), csv_path);
  fibernet::write_text_file(
      fibernet::study_metadata_json(result, study, config.hash()), meta_path);

  std::printf("rate_l2 %.6f\nrate_energy %.6f\n", result.l2_fit.slope,
              result.energy_fit.slope);
  log_line("study: " + std::to_string(result.rows.size()) + " rows, " +
           std::to_string(result.network_nodes) + " nodes (" +
           std::to_string(timer.seconds()) + "s)");
  write_manifest("study", config, {csv_path, meta_path},
                 prefix + ".manifest.json");
  return 0;
}

int cmd_info(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw fibernet::io_error("file not found: " + path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded() && parsed.is_object()) {
    std::printf("file: %s\n", path.c_str());
    if (parsed.contains("format_version"))
      std::printf("format_version: %s\n",
                  parsed["format_version"].dump().c_str());
    for (const char* key : {"command", "generator", "scheme", "method",
                            "problem", "config_hash"})
      if (parsed.contains(key))
        std::printf("%s: %s\n", key,
                    parsed[key].get<std::string>().c_str());
    for (const char* key : {"domain_side", "seed", "dof_count"})
      if (parsed.contains(key))
        std::printf("%s: %s\n", key, parsed[key].dump().c_str());
    for (const char* key : {"nodes", "edges", "pairs", "artifacts", "u"})
      if (parsed.contains(key) && parsed[key].is_array())
        std::printf("%s: %zu entries\n", key, parsed[key].size());
    return 0;
  }

  // Not JSON: report line shape (covers the study CSV and COO dumps).
  std::size_t lines = 0;
  std::string first;
  std::istringstream stream(text);
  for (std::string line; std::getline(stream, line); ++lines)
    if (lines == 0) first = line;
  std::printf("file: %s\ntext lines: %zu\nfirst line: %s\n", path.c_str(),
              lines, first.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete fiber-network models with a localized multiscale solver"};
  app.require_subcommand(1);

  std::string config_path;
  Config config;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "INI config file; flags override keys")
        ->check(CLI::ExistingFile);
  };

  // generate
  auto* generate = app.add_subcommand("generate", "Build a network file");
  add_common(generate);
  Overrides gen_over(config);
  gen_over.add_string(generate, "--type", "network.type",
                      "structured | perturbed | fiber");
  gen_over.add_string(generate, "--m", "network.m_fine", "fine grid cells per side");
  gen_over.add_string(generate, "--domain", "network.domain_side", "square side [m]");
  gen_over.add_string(generate, "--magnitude", "network.magnitude",
                      "perturbation amplitude (fraction of h, < 0.5)");
  gen_over.add_string(generate, "--pair-rule", "network.pair_rule",
                      "all | collinear | perpendicular");
  gen_over.add_string(generate, "--seed", "network.seed", "generation seed");
  gen_over.add_string(generate, "--coefficient-seed", "network.coefficient_seed",
                      "coefficient sampling seed");
  gen_over.add_string(generate, "--scheme", "network.scheme",
                      "homogeneous | random | fiber");
  gen_over.add_string(generate, "--fiber-count", "network.fiber_count",
                      "number of fibers");
  gen_over.add_string(generate, "--fiber-length", "network.fiber_length",
                      "fiber length [m]");
  gen_over.add_string(generate, "--target-nodes", "network.target_nodes",
                      "adjust fiber count toward this node count");
  gen_over.add_string(generate, "--merge-radius", "network.merge_radius",
                      "crossing fusion radius [m]");
  gen_over.add_string(generate, "--out", "cli.network_file", "output path");

  // solve
  auto* solve = app.add_subcommand("solve", "Assemble and solve one problem");
  add_common(solve);
  Overrides solve_over(config);
  solve_over.add_string(solve, "--network", "cli.network_file", "network file");
  solve_over.add_string(solve, "--method", "cli.method", "exact | lod");
  solve_over.add_string(solve, "--problem", "assembly.problem", "force | displace");
  solve_over.add_string(solve, "--m", "multiscale.m", "coarse cells per side (lod)");
  solve_over.add_string(solve, "--loc-factor", "multiscale.loc_factor",
                        "localization radius factor");
  solve_over.add_string(solve, "--log-base", "multiscale.log_base",
                        "localization log base ('e' or a number)");
  solve_over.add_string(solve, "--threads", "cli.threads", "worker cap (0 = auto)");
  solve_over.add_string(solve, "--out", "cli.solution_file", "output path");
  solve_over.add_string(solve, "--dump-basis", "cli.basis_file",
                        "write the multiscale basis in coordinate format");

  // study
  auto* study = app.add_subcommand("study", "Run a convergence study");
  add_common(study);
  Overrides study_over(config);
  study_over.add_string(study, "--type", "network.type",
                        "structured | perturbed | fiber");
  study_over.add_string(study, "--m", "network.m_fine", "fine grid cells per side");
  study_over.add_string(study, "--domain", "network.domain_side", "square side [m]");
  study_over.add_string(study, "--seed", "network.seed", "generation seed");
  study_over.add_string(study, "--target-nodes", "network.target_nodes",
                        "fiber node target");
  study_over.add_string(study, "--scheme", "network.scheme",
                        "homogeneous | random | fiber");
  study_over.add_string(study, "--problem", "assembly.problem", "force | displace");
  study_over.add_string(study, "--m-list", "analysis.m_list",
                        "comma-separated coarse sizes");
  study_over.add_string(study, "--timing", "analysis.timing",
                        "record wall times (false pins the column to zero)");
  study_over.add_string(study, "--loc-factor", "multiscale.loc_factor",
                        "localization radius factor");
  study_over.add_string(study, "--log-base", "multiscale.log_base",
                        "localization log base ('e' or a number)");
  study_over.add_string(study, "--threads", "cli.threads", "worker cap (0 = auto)");
  study_over.add_string(study, "--out", "cli.study_prefix",
                        "output prefix for .csv/.meta.json");

  // info
  auto* info = app.add_subcommand("info", "Print file metadata");
  std::string info_path;
  info->add_option("file", info_path, "network / solution / manifest / CSV file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) config = Config::parse_file(config_path);
    gen_over.apply();
    solve_over.apply();
    study_over.apply();

    if (generate->parsed()) return cmd_generate(config);
    if (solve->parsed()) return cmd_solve(config);
    if (study->parsed()) return cmd_study(config);
    if (info->parsed()) return cmd_info(info_path);
  } catch (const fibernet::config_error& err) {
    std::cerr << "fibernet: config error: " << err.what() << "\n";
    return 2;
  } catch (const fibernet::io_error& err) {
    std::cerr << "fibernet: io error: " << err.what() << "\n";
    return 2;
  } catch (const fibernet::numerical_error& err) {
    std::cerr << "fibernet: numerical error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "fibernet: error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
