#include "doctest.h"
#include "oracle.hpp"

#include "fibernet/analysis.hpp"
#include "fibernet/rng.hpp"
#include "fibernet/study_io.hpp"

#include <cmath>

using namespace fibernet;

TEST_SUITE_BEGIN("analysis");

TEST_CASE("relative errors normalize against the reference") {
  const Network net = oracle::tiny_network(0);
  const StiffnessSystem sys = oracle::assemble(net);
  Eigen::VectorXd u(net.dof_count());
  Rng rng(8);
  for (int d = 0; d < u.size(); ++d) u[d] = rng.uniform(-1.0, 1.0);

  const Errors zero = relative_errors(u, u, sys.K);
  CHECK(zero.rel_l2 == 0.0);
  CHECK(zero.rel_energy == 0.0);

  const Errors full = relative_errors(u, Eigen::VectorXd::Zero(u.size()), sys.K);
  CHECK(full.rel_l2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(full.rel_energy == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(
      (void)relative_errors(Eigen::VectorXd::Zero(u.size()), u, sys.K),
      numerical_error);
}

TEST_CASE("energy norm agrees with per-element summed quadratic forms") {
  for (int which : {0, 1, 2}) {
    CAPTURE(which);
    const Network net = oracle::tiny_network(which);
    const StiffnessSystem sys = oracle::assemble(net);
    Rng rng(40 + static_cast<std::uint64_t>(which));
    Eigen::VectorXd u(net.dof_count()), v(net.dof_count());
    for (int d = 0; d < u.size(); ++d) {
      u[d] = rng.uniform(-1.0, 1.0);
      v[d] = rng.uniform(-1.0, 1.0);
    }
    const Errors err = relative_errors(u, v, sys.K);
    const Eigen::VectorXd diff = u - v;
    const double via_elements =
        std::sqrt(2.0 * oracle::element_energy(net, diff)) /
        std::sqrt(2.0 * oracle::element_energy(net, u));
    CHECK(err.rel_energy == doctest::Approx(via_elements).epsilon(1e-12));
  }
}

TEST_CASE("rate fits recover exact power laws") {
  const std::vector<double> H = {0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> quadratic, linear;
  for (double h : H) {
    quadratic.push_back(h * h);
    linear.push_back(3.0 * h);
  }
  const RateFit fit2 = fit_rate(H, quadratic);
  CHECK(fit2.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit2.residual_variance <= 1e-24);
  CHECK(fit2.rows_used == 4);

  const RateFit fit1 = fit_rate(H, linear);
  CHECK(fit1.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::exp(fit1.intercept) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("noisy data still fits near the underlying slope") {
  Rng rng(17);
  const std::vector<double> H = {0.5, 0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> errors;
  for (double h : H) errors.push_back(h * h * rng.uniform(0.9, 1.1));
  const RateFit fit = fit_rate(H, errors);
  CHECK(fit.slope >= 1.8);
  CHECK(fit.slope <= 2.2);
  CHECK(fit.residual_variance > 0.0);
}

TEST_CASE("zero-error rows are excluded from the fit") {
  const RateFit fit = fit_rate({0.5, 0.25, 0.125}, {0.25, 0.0, 0.015625});
  CHECK(fit.rows_used == 2);
  CHECK(fit.rows_excluded == 1);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)fit_rate({0.5, 0.25}, {0.0, 0.0}), numerical_error);
  CHECK_THROWS_AS((void)fit_rate({0.5}, {0.25}), numerical_error);
}

TEST_CASE("studies produce decreasing errors at near-optimal rates") {
  StudyConfig config;
  config.network.type = NetworkSpec::Type::perturbed;
  config.network.m_fine = 32;
  config.network.seed = 2;
  config.scheme = RandomUniformScheme{};
  config.coefficient_seed = 3;
  config.m_list = {2, 4, 8};
  config.timing = false;

  const StudyResult result = run_study(config);
  REQUIRE(result.rows.size() == 3);
  for (const StudyRow& row : result.rows) {
    CHECK(row.ok);
    CHECK(row.rel_l2 > 0.0);
    CHECK(row.rel_energy > 0.0);
    CHECK(row.ell == doctest::Approx(1.5 * row.H * std::log(row.m)));
  }
  for (std::size_t r = 1; r < result.rows.size(); ++r) {
    CHECK(result.rows[r].rel_l2 < result.rows[r - 1].rel_l2);
    CHECK(result.rows[r].rel_energy < result.rows[r - 1].rel_energy);
  }
  CHECK(result.reference_residual <= 1e-10);
  CHECK(result.l2_fit.slope > result.energy_fit.slope);
  CHECK(result.energy_fit.slope > 0.0);
}

TEST_CASE("identical studies serialize identically") {
  StudyConfig config;
  config.network.type = NetworkSpec::Type::perturbed;
  config.network.m_fine = 16;
  config.network.seed = 5;
  config.m_list = {2, 4};
  config.timing = false;

  const StudyResult a = run_study(config);
  config.threads = 3;
  const StudyResult b = run_study(config);

  CHECK(study_csv(a) == study_csv(b));
  CHECK(study_csv(a).substr(0, study_csv(a).find('\n')) ==
        "m,H,ell,rel_l2,rel_energy,wall_seconds");

  // Timing off pins the wall clock column to zero.
  for (const StudyRow& row : a.rows) CHECK(row.wall_seconds == 0.0);

  // With timing on, the CSV still parses but is no longer byte-stable.
  config.timing = true;
  const StudyResult timed = run_study(config);
  bool any_positive = false;
  for (const StudyRow& row : timed.rows) any_positive |= row.wall_seconds > 0.0;
  CHECK(any_positive);
}

TEST_CASE("study validation rejects malformed coarse lists") {
  StudyConfig config;
  config.network.m_fine = 8;
  config.m_list = {4};
  CHECK_THROWS_AS((void)run_study(config), config_error);
  config.m_list = {8, 4};
  CHECK_THROWS_AS((void)run_study(config), config_error);
  config.m_list = {1, 4};
  CHECK_THROWS_AS((void)run_study(config), config_error);
}

TEST_CASE("structured grids follow the fit line more closely than perturbed") {
  StudyConfig config;
  config.network.type = NetworkSpec::Type::structured;
  config.network.m_fine = 32;
  config.network.domain_side = 0.01;
  config.scheme = HomogeneousScheme{};
  config.problem.kind = ProblemSpec::Kind::displaced_right_boundary;
  config.m_list = {2, 4, 8};
  config.timing = false;

  const StudyResult structured = run_study(config);
  config.network.type = NetworkSpec::Type::perturbed;
  config.network.seed = 21;
  const StudyResult perturbed = run_study(config);

  CHECK(structured.energy_fit.residual_variance <=
        perturbed.energy_fit.residual_variance);
}

TEST_SUITE_END();
