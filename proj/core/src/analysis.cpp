#include "fibernet/analysis.hpp"

#include "fibernet/coarse.hpp"
#include "fibernet/lod.hpp"
#include "fibernet/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fibernet {

Errors relative_errors(const Eigen::VectorXd& u, const Eigen::VectorXd& u_ms,
                       const SparseMat& K) {
  if (u.size() != u_ms.size() || u.size() != K.rows())
    throw config_error("solution vectors do not match the system size");
  const double u_norm = u.norm();
  const double u_energy = u.dot(K * u);
  if (!(u_norm > 0.0) || !(u_energy > 0.0))
    throw numerical_error("reference solution is zero; relative errors undefined");
  const Eigen::VectorXd e = u - u_ms;
  Errors errors;
  errors.rel_l2 = e.norm() / u_norm;
  errors.rel_energy = std::sqrt(std::max(e.dot(K * e), 0.0) / u_energy);
  return errors;
}

RateFit fit_rate(const std::vector<double>& H, const std::vector<double>& errors) {
  if (H.size() != errors.size())
    throw config_error("rate fit inputs differ in length");
  std::vector<double> x, y;
  RateFit fit;
  for (std::size_t r = 0; r < H.size(); ++r) {
    if (!(errors[r] > 0.0)) {
      ++fit.rows_excluded;
      continue;
    }
    x.push_back(std::log(H[r]));
    y.push_back(std::log(errors[r]));
  }
  const int n = static_cast<int>(x.size());
  if (n < 2)
    throw numerical_error("rate fit needs at least 2 positive-error rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int r = 0; r < n; ++r) {
    sx += x[static_cast<std::size_t>(r)];
    sy += y[static_cast<std::size_t>(r)];
    sxx += x[static_cast<std::size_t>(r)] * x[static_cast<std::size_t>(r)];
    sxy += x[static_cast<std::size_t>(r)] * y[static_cast<std::size_t>(r)];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw numerical_error("rate fit is degenerate (equal H)");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ssr = 0.0;
  for (int r = 0; r < n; ++r) {
    const double resid = y[static_cast<std::size_t>(r)] -
                         (fit.intercept + fit.slope * x[static_cast<std::size_t>(r)]);
    ssr += resid * resid;
  }
  fit.residual_variance = ssr / n;
  fit.rows_used = n;
  return fit;
}

std::string network_type_name(NetworkSpec::Type type) {
  switch (type) {
    case NetworkSpec::Type::structured: return "structured";
    case NetworkSpec::Type::perturbed: return "perturbed";
    case NetworkSpec::Type::fiber: return "fiber";
  }
  return "structured";
}

NetworkSpec::Type network_type_from_name(const std::string& name) {
  if (name == "structured") return NetworkSpec::Type::structured;
  if (name == "perturbed") return NetworkSpec::Type::perturbed;
  if (name == "fiber") return NetworkSpec::Type::fiber;
  throw config_error("unknown network type: " + name);
}

Network build_network(const NetworkSpec& spec) {
  switch (spec.type) {
    case NetworkSpec::Type::structured:
      return generate_structured(spec.m_fine, spec.domain_side, spec.pair_rule);
    case NetworkSpec::Type::perturbed:
      return generate_perturbed(spec.m_fine, spec.domain_side, spec.magnitude,
                                spec.seed, spec.pair_rule);
    case NetworkSpec::Type::fiber:
      return generate_fiber_network(spec.domain_side, spec.fiber, spec.seed);
  }
  throw config_error("unknown network type");
}

StudyResult run_study(const StudyConfig& config) {
  if (config.m_list.size() < 2)
    throw config_error("study needs at least 2 coarse sizes");
  for (std::size_t r = 0; r < config.m_list.size(); ++r) {
    if (config.m_list[r] < 2)
      throw config_error("coarse sizes must be at least 2");
    if (r > 0 && config.m_list[r] <= config.m_list[r - 1])
      throw config_error("coarse sizes must be strictly increasing");
  }

  Network net = build_network(config.network);
  assign_coefficients(net, config.scheme, config.coefficient_seed);
  StiffnessSystem system = assemble_stiffness(net);
  build_problem(net, system, config.problem);
  const ReferenceSolution reference = solve_reference(system);
  const std::vector<char> free_mask = system.free_mask();

  StudyResult result;
  result.reference_residual = reference.residual;
  result.network_nodes = net.node_count();
  result.free_dofs = static_cast<int>(system.free.size());

  for (int m : config.m_list) {
    StudyRow row;
    row.m = m;
    row.H = net.domain_side / m;
    try {
      row.ell = localization_radius(row.H, m, config.loc_factor, config.log_base);
      const auto start = std::chrono::steady_clock::now();
      const CoarseGrid grid = build_coarse_grid(net, m);
      const ShapeMatrix shape = evaluate_shape_functions(grid, net);
      const CoarseSpace space = restrict_to_free(shape, free_mask);
      const MultiscaleBasis basis = build_multiscale_basis(
          net, grid, space, system.K, free_mask, row.ell, config.threads);
      const MultiscaleSolution solution = solve_multiscale(system, basis);
      const auto stop = std::chrono::steady_clock::now();
      const Errors errors = relative_errors(reference.u, solution.u, system.K);
      row.rel_l2 = errors.rel_l2;
      row.rel_energy = errors.rel_energy;
      if (config.timing)
        row.wall_seconds = std::chrono::duration<double>(stop - start).count();
      row.ok = true;
    } catch (const std::exception& err) {
      row.message = err.what();
    }
    result.rows.push_back(row);
  }

  std::vector<double> hs, l2, energy;
  for (const StudyRow& row : result.rows) {
    if (!row.ok) continue;
    hs.push_back(row.H);
    l2.push_back(row.rel_l2);
    energy.push_back(row.rel_energy);
  }
  const std::size_t need = std::min<std::size_t>(3, config.m_list.size());
  if (hs.size() < need) {
    std::string detail;
    for (const StudyRow& row : result.rows)
      if (!row.ok) detail += " [m=" + std::to_string(row.m) + "] " + row.message;
    throw numerical_error("study failed: fewer than " + std::to_string(need) +
                          " rows succeeded;" + detail);
  }
  result.l2_fit = fit_rate(hs, l2);
  result.energy_fit = fit_rate(hs, energy);
  return result;
}

} // namespace fibernet
