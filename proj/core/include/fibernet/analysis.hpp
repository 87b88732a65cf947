#pragma once

#include "fibernet/assembly.hpp"
#include "fibernet/generators.hpp"
#include "fibernet/network.hpp"
#include "fibernet/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fibernet {

struct Errors {
  double rel_l2 = 0.0;
  double rel_energy = 0.0;
};

/// rel_l2 = |u - u_ms| / |u|, rel_energy in the K-induced norm. Rejects a
/// zero reference solution.
Errors relative_errors(const Eigen::VectorXd& u, const Eigen::VectorXd& u_ms,
                       const SparseMat& K);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_variance = 0.0; // mean squared log-residual around the fit
  int rows_used = 0;
  int rows_excluded = 0; // zero-error rows dropped
};

/// Least-squares slope of log(error) against log(H). Needs >= 2 positive
/// error rows.
RateFit fit_rate(const std::vector<double>& H, const std::vector<double>& errors);

/// Everything needed to rebuild one network deterministically.
struct NetworkSpec {
  enum class Type { structured, perturbed, fiber };
  Type type = Type::structured;
  int m_fine = 64;           // grid types
  double domain_side = 1.0;
  double magnitude = 0.25;   // perturbed
  PairRule pair_rule = PairRule::all;
  FiberParams fiber;         // fiber type
  std::uint64_t seed = 1;
};

std::string network_type_name(NetworkSpec::Type type);
NetworkSpec::Type network_type_from_name(const std::string& name);

Network build_network(const NetworkSpec& spec);

struct StudyConfig {
  NetworkSpec network;
  CoefficientScheme scheme = HomogeneousScheme{};
  std::uint64_t coefficient_seed = 1;
  ProblemSpec problem;
  std::vector<int> m_list = {4, 8, 16, 32};
  double loc_factor = 1.5;
  double log_base = 2.718281828459045;
  int threads = 0;
  bool timing = true; // false pins wall_seconds to 0 for byte-stable output
};

struct StudyRow {
  int m = 0;
  double H = 0.0;
  double ell = 0.0;
  double rel_l2 = 0.0;
  double rel_energy = 0.0;
  double wall_seconds = 0.0;
  bool ok = false;
  std::string message; // failure diagnostic when !ok
};

struct StudyResult {
  std::vector<StudyRow> rows; // ordered by m, one per requested size
  RateFit l2_fit;
  RateFit energy_fit;
  double reference_residual = 0.0;
  int network_nodes = 0;
  int free_dofs = 0;
};

/// Generates once, assembles once, solves the reference once, then runs the
/// multiscale solve for every coarse size. Fails unless at least
/// min(3, requested) rows succeed.
StudyResult run_study(const StudyConfig& config);

} // namespace fibernet
