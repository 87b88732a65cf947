#include "doctest.h"
#include "oracle.hpp"

#include "fibernet/analysis.hpp"
#include "fibernet/assembly.hpp"
#include "fibernet/coarse.hpp"
#include "fibernet/generators.hpp"
#include "fibernet/lod.hpp"
#include "fibernet/solver.hpp"

#include <algorithm>
#include <cmath>

using namespace fibernet;

namespace {

struct Setup {
  Network net;
  StiffnessSystem sys;
  CoarseGrid grid;
  CoarseSpace space;
};

Setup make_setup(int m_fine, int m, ProblemSpec::Kind kind,
                 std::uint64_t seed = 3) {
  Setup s;
  s.net = generate_perturbed(m_fine, 1.0, 0.25, seed);
  RandomUniformScheme scheme;
  assign_coefficients(s.net, scheme, seed + 1);
  s.sys = assemble_stiffness(s.net);
  ProblemSpec spec;
  spec.kind = kind;
  build_problem(s.net, s.sys, spec);
  s.grid = build_coarse_grid(s.net, m);
  s.space = restrict_to_free(evaluate_shape_functions(s.grid, s.net),
                             s.sys.free_mask());
  return s;
}

double energy_norm(const SparseMat& K, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(K * v)));
}

} // namespace

TEST_SUITE_BEGIN("lod");

TEST_CASE("localization radius follows factor H log m") {
  CHECK(localization_radius(0.0625, 16) ==
        doctest::Approx(1.5 * 0.0625 * std::log(16.0)).epsilon(1e-15));
  // ... which is about a quarter of the domain for m = 16.
  CHECK(localization_radius(0.0625, 16) == doctest::Approx(0.26).epsilon(0.01));
  CHECK(localization_radius(0.1, 8, 2.0, 2.0) ==
        doctest::Approx(2.0 * 0.1 * std::log2(8.0)).epsilon(1e-15));
}

TEST_CASE("patches nest as the radius grows and cover everything eventually") {
  const Setup s = make_setup(16, 4, ProblemSpec::Kind::fixed_boundary_force);
  const auto mask = s.sys.free_mask();
  const int row = s.space.coarse_dim() / 2;

  const Patch p1 = compute_patch(s.net, s.grid, s.space, mask, row, 0.15);
  const Patch p2 = compute_patch(s.net, s.grid, s.space, mask, row, 0.40);
  CHECK(p1.dofs.size() < p2.dofs.size());
  CHECK(std::includes(p2.dofs.begin(), p2.dofs.end(), p1.dofs.begin(),
                      p1.dofs.end()));
  CHECK(std::includes(p2.rows.begin(), p2.rows.end(), p1.rows.begin(),
                      p1.rows.end()));

  // Radius beyond the domain diagonal covers every free dof.
  const Patch global = compute_patch(s.net, s.grid, s.space, mask, row, 2.0);
  CHECK(global.dofs.size() == s.sys.free.size());
  CHECK(global.rows.size() == static_cast<std::size_t>(s.space.coarse_dim()));

  // Patch dofs are free dofs only.
  for (int d : p1.dofs) CHECK(mask[static_cast<std::size_t>(d)] == 1);
}

TEST_CASE("correctors stay l2-orthogonal to the coarse space") {
  const Setup s = make_setup(8, 4, ProblemSpec::Kind::fixed_boundary_force);
  const auto mask = s.sys.free_mask();
  for (int row = 0; row < s.space.coarse_dim(); row += 7) {
    const Patch patch = compute_patch(s.net, s.grid, s.space, mask, row, 0.5);
    const Corrector c = solve_corrector(s.sys.K, s.space, row, patch);
    REQUIRE(c.values.size() == static_cast<int>(c.patch.size()));

    Eigen::VectorXd phi = Eigen::VectorXd::Zero(s.net.dof_count());
    for (std::size_t a = 0; a < c.patch.size(); ++a)
      phi[c.patch[a]] = c.values[static_cast<int>(a)];
    const double pn = phi.norm();
    if (pn == 0.0) continue;
    CHECK((s.space.lambda * phi).norm() <= 1e-10 * pn);
    CHECK(c.constraint_norm <= 1e-10);
    CHECK(c.residual_norm <= 1e-8);
  }
}

TEST_CASE("global corrector kills the W-residual for a spanning set") {
  const Setup s = make_setup(8, 2, ProblemSpec::Kind::fixed_boundary_force);
  const auto mask = s.sys.free_mask();
  const oracle::WProjector proj(s.space.lambda);

  const int row = 0;
  const Patch patch = compute_patch(s.net, s.grid, s.space, mask, row, 3.0);
  const Corrector c = solve_corrector(s.sys.K, s.space, row, patch);

  // psi = lambda - phi
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(s.net.dof_count());
  for (std::size_t a = 0; a < c.patch.size(); ++a)
    psi[c.patch[a]] = -c.values[static_cast<int>(a)];
  for (SparseMatRM::InnerIterator it(s.space.lambda_rm, row); it; ++it)
    psi[it.col()] += it.value();

  const double psi_e = energy_norm(s.sys.K, psi);
  for (int d : s.sys.free) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(s.net.dof_count());
    e[d] = 1.0;
    const Eigen::VectorXd w = proj.apply(e);
    const double wn = energy_norm(s.sys.K, w);
    if (wn == 0.0) continue;
    CHECK(std::abs(w.dot(s.sys.K * psi)) <= 1e-8 * wn * psi_e);
  }
}

TEST_CASE("an identity operator needs no correction") {
  // With K = I the corrector right-hand side is w^T lambda_i = 0 because
  // W is the l2 complement of the coarse space, so phi vanishes.
  const Setup s = make_setup(8, 4, ProblemSpec::Kind::fixed_boundary_force);
  const auto mask = s.sys.free_mask();

  SparseMat I(s.net.dof_count(), s.net.dof_count());
  I.setIdentity();
  const int row = s.space.coarse_dim() / 3;
  const Patch patch = compute_patch(s.net, s.grid, s.space, mask, row, 3.0);
  const Corrector c = solve_corrector(I, s.space, row, patch);
  CHECK(c.values.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("basis columns keep the coarse trace of their shape functions") {
  const Setup s = make_setup(8, 4, ProblemSpec::Kind::displaced_right_boundary);
  const auto mask = s.sys.free_mask();
  const double ell = localization_radius(s.grid.H, s.grid.m);
  const MultiscaleBasis basis =
      build_multiscale_basis(s.net, s.grid, s.space, s.sys.K, mask, ell);

  CHECK(basis.coarse_dim() == s.space.coarse_dim());
  CHECK(basis.max_constraint_norm <= 1e-10);

  // Lambda psi_i = Lambda lambda_i, i.e. the corrector is invisible to the
  // coarse projection.
  const SparseMat gram_psi = s.space.lambda * basis.psi;
  const SparseMat gram_lambda = s.space.lambda * SparseMat(s.space.lambda.transpose());
  CHECK(matrix_scale(SparseMat(gram_psi - gram_lambda)) <=
        1e-10 * matrix_scale(gram_lambda));
}

TEST_CASE("basis count equals the retained coarse dofs") {
  Network net = generate_structured(8, 1.0);
  assign_coefficients(net, HomogeneousScheme{}, 1);
  StiffnessSystem sys = assemble_stiffness(net);
  ProblemSpec spec;
  spec.kind = ProblemSpec::Kind::fixed_boundary_force;
  build_problem(net, sys, spec);
  const CoarseGrid grid = build_coarse_grid(net, 4);
  const CoarseSpace space =
      restrict_to_free(evaluate_shape_functions(grid, net), sys.free_mask());

  const MultiscaleBasis basis = build_multiscale_basis(
      net, grid, space, sys.K, sys.free_mask(), localization_radius(grid.H, 4));
  // Every coarse hat keeps interior support on the finer grid, so nothing
  // beyond the restriction rule is dropped: 2 (m+1)^2 columns.
  CHECK(basis.coarse_dim() == 2 * 5 * 5);
  CHECK(basis.psi.rows() == net.dof_count());

  // Columns vanish on constrained dofs.
  for (int c = 0; c < basis.psi.outerSize(); ++c)
    for (SparseMat::InnerIterator it(basis.psi, c); it; ++it)
      CHECK_FALSE(sys.is_constrained(static_cast<int>(it.row())));
}

TEST_CASE("multiscale solve reproduces basis members and zero loads") {
  const Setup s = make_setup(8, 4, ProblemSpec::Kind::fixed_boundary_force);
  const MultiscaleBasis basis = build_multiscale_basis(
      s.net, s.grid, s.space, s.sys.K, s.sys.free_mask(), 3.0);

  // F = K psi_j is reproduced exactly by the coarse Galerkin solve.
  StiffnessSystem sys = s.sys;
  const int j = basis.coarse_dim() / 2;
  const Eigen::VectorXd psi_j = Eigen::VectorXd(basis.psi.col(j));
  sys.F = s.sys.K * psi_j;
  const MultiscaleSolution sol = solve_multiscale(sys, basis);
  CHECK(sol.coarse_asymmetry <= 1e-12);
  CHECK((sol.u - psi_j).norm() <= 1e-8 * psi_j.norm());

  // F = 0 with homogeneous constraints gives u = 0.
  sys.F.setZero();
  const MultiscaleSolution zero = solve_multiscale(sys, basis);
  CHECK(zero.u.norm() == 0.0);
}

TEST_CASE("global correctors give Galerkin and coarse-projection identities") {
  for (const auto kind : {ProblemSpec::Kind::fixed_boundary_force,
                          ProblemSpec::Kind::displaced_right_boundary}) {
    CAPTURE(problem_name(kind));
    const Setup s = make_setup(16, 4, kind, 6);
    const MultiscaleBasis basis = build_multiscale_basis(
        s.net, s.grid, s.space, s.sys.K, s.sys.free_mask(), 3.0);
    const MultiscaleSolution ms = solve_multiscale(s.sys, basis);
    const ReferenceSolution ref = solve_reference(s.sys);

    const Eigen::VectorXd err = ref.u - ms.u;
    const double scale = matrix_scale(s.sys.K) * ref.u.norm();

    const Eigen::VectorXd galerkin =
        SparseMat(basis.psi.transpose()) * (s.sys.K * err);
    CHECK(galerkin.norm() <= 1e-8 * basis.psi.norm() * scale);

    const Eigen::VectorXd coarse_err = s.space.lambda * err;
    CHECK(coarse_err.norm() <= 1e-8 * s.space.lambda.norm() * ref.u.norm());
  }
}

TEST_CASE("the basis is bit-identical for any thread count or order") {
  const Setup s = make_setup(8, 4, ProblemSpec::Kind::fixed_boundary_force);
  const double ell = localization_radius(s.grid.H, s.grid.m);
  const MultiscaleBasis one = build_multiscale_basis(
      s.net, s.grid, s.space, s.sys.K, s.sys.free_mask(), ell, 1);
  const MultiscaleBasis four = build_multiscale_basis(
      s.net, s.grid, s.space, s.sys.K, s.sys.free_mask(), ell, 4);
  const MultiscaleBasis dflt = build_multiscale_basis(
      s.net, s.grid, s.space, s.sys.K, s.sys.free_mask(), ell, 0);

  CHECK(SparseMat(one.psi - four.psi).norm() == 0.0);
  CHECK(SparseMat(one.psi - dflt.psi).norm() == 0.0);

  const MultiscaleSolution a = solve_multiscale(s.sys, one);
  const MultiscaleSolution b = solve_multiscale(s.sys, four);
  CHECK((a.u - b.u).norm() == 0.0);
}

TEST_CASE("longer localization radii only improve the energy error") {
  const Setup s = make_setup(16, 4, ProblemSpec::Kind::fixed_boundary_force, 12);
  const ReferenceSolution ref = solve_reference(s.sys);

  const double H = s.grid.H;
  std::vector<double> errors;
  for (const double ell : {1.0 * H, 2.0 * H, 3.0}) {
    const MultiscaleBasis basis = build_multiscale_basis(
        s.net, s.grid, s.space, s.sys.K, s.sys.free_mask(), ell);
    const MultiscaleSolution ms = solve_multiscale(s.sys, basis);
    const Eigen::VectorXd err = ref.u - ms.u;
    errors.push_back(energy_norm(s.sys.K, err));
  }
  for (std::size_t i = 1; i < errors.size(); ++i)
    CHECK(errors[i] <= errors[i - 1] * (1.0 + 1e-9) + 1e-13);
}

TEST_SUITE_END();
