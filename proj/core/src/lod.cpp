#include "fibernet/lod.hpp"

#include "fibernet/solver.hpp"
#include "fibernet/threading.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace fibernet {

double localization_radius(double H, int m, double factor, double log_base) {
  if (m < 2) throw config_error("coarse size m must be at least 2");
  if (!(factor > 0.0)) throw config_error("localization factor must be positive");
  if (!(log_base > 1.0)) throw config_error("log base must exceed 1");
  return factor * H * std::log(static_cast<double>(m)) / std::log(log_base);
}

Patch compute_patch(const Network& net, const CoarseGrid& grid,
                    const CoarseSpace& space, const std::vector<char>& free_mask,
                    int row, double ell) {
  if (!(ell > 0.0)) throw config_error("localization radius must be positive");
  const int coarse_dof = space.kept[static_cast<std::size_t>(row)];
  const Vec2 center = grid.coarse_position(coarse_dof / 2);

  Patch patch;
  for (int node = 0; node < net.node_count(); ++node) {
    const Vec2& p = net.nodes[static_cast<std::size_t>(node)].position;
    if ((p - center).norm() > ell) continue;
    for (int axis = 0; axis < 2; ++axis) {
      const int dof = 2 * node + axis;
      if (free_mask[static_cast<std::size_t>(dof)]) patch.dofs.push_back(dof);
    }
  }
  if (patch.dofs.empty())
    throw numerical_error("empty corrector patch for coarse dof " +
                          std::to_string(coarse_dof) +
                          " (ell too small for the network density)");

  std::vector<char> row_hit(static_cast<std::size_t>(space.coarse_dim()), 0);
  for (int dof : patch.dofs)
    for (SparseMat::InnerIterator it(space.lambda, dof); it; ++it)
      row_hit[static_cast<std::size_t>(it.row())] = 1;
  for (int r = 0; r < space.coarse_dim(); ++r)
    if (row_hit[static_cast<std::size_t>(r)]) patch.rows.push_back(r);
  return patch;
}

Corrector solve_corrector(const SparseMat& K, const CoarseSpace& space, int row,
                          const Patch& patch) {
  const int np = static_cast<int>(patch.dofs.size());
  const int nr = static_cast<int>(patch.rows.size());

  Corrector corrector;
  corrector.coarse_dof = space.kept[static_cast<std::size_t>(row)];
  corrector.patch = patch.dofs;

  // Right-hand side (K lambda_i) restricted to the patch.
  Eigen::VectorXd lambda_i = Eigen::VectorXd::Zero(K.rows());
  for (SparseMatRM::InnerIterator it(space.lambda_rm, row); it; ++it)
    lambda_i[it.col()] = it.value();
  const Eigen::VectorXd Klambda = K * lambda_i;
  Eigen::VectorXd b(np);
  for (int q = 0; q < np; ++q) b[q] = Klambda[patch.dofs[static_cast<std::size_t>(q)]];

  if (b.norm() == 0.0) {
    corrector.values = Eigen::VectorXd::Zero(np);
    return corrector;
  }

  // Constraint block C: coarse rows on patch columns.
  std::vector<int> row_pos(static_cast<std::size_t>(space.coarse_dim()), -1);
  for (int r = 0; r < nr; ++r)
    row_pos[static_cast<std::size_t>(patch.rows[static_cast<std::size_t>(r)])] = r;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nr, np);
  for (int q = 0; q < np; ++q) {
    for (SparseMat::InnerIterator it(space.lambda, patch.dofs[static_cast<std::size_t>(q)]);
         it; ++it) {
      const int r = row_pos[static_cast<std::size_t>(it.row())];
      if (r >= 0) C(r, q) = it.value();
    }
  }

  const SparseMat Kpp = submatrix(K, patch.dofs, patch.dofs);
  ScaledLdlt ldlt(Kpp);
  if (!ldlt.positive_definite())
    throw numerical_error("corrector patch for coarse dof " +
                          std::to_string(corrector.coarse_dof) +
                          " is not positive definite");

  Eigen::MatrixXd rhs(np, nr + 1);
  rhs.col(0) = b;
  rhs.rightCols(nr) = C.transpose();
  const Eigen::MatrixXd sol = ldlt.solve_block(rhs);
  const Eigen::VectorXd yb = sol.col(0);
  const Eigen::MatrixXd Y = sol.rightCols(nr);

  // Schur system over the multipliers. Restriction can leave redundant
  // (consistent) constraint rows, so S may be singular; a rank-revealing
  // least-squares solve still yields the unique phi.
  const Eigen::MatrixXd S = C * Y;
  const Eigen::VectorXd schur_rhs = C * yb;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(S);
  const Eigen::VectorXd mu = cod.solve(schur_rhs);

  corrector.values = yb - Y * mu;
  const double phi_norm = corrector.values.norm();
  if (phi_norm > 0.0)
    corrector.constraint_norm = (C * corrector.values).norm() / phi_norm;
  corrector.residual_norm =
      (Kpp * corrector.values + C.transpose() * mu - b).norm() / b.norm();
  return corrector;
}

MultiscaleBasis build_multiscale_basis(const Network& net, const CoarseGrid& grid,
                                       const CoarseSpace& space,
                                       const SparseMat& K,
                                       const std::vector<char>& free_mask,
                                       double ell, int threads) {
  const int nc = space.coarse_dim();
  std::vector<Corrector> correctors(static_cast<std::size_t>(nc));
  parallel_for(nc, threads, [&](int row) {
    const Patch patch = compute_patch(net, grid, space, free_mask, row, ell);
    correctors[static_cast<std::size_t>(row)] = solve_corrector(K, space, row, patch);
  });

  MultiscaleBasis basis;
  basis.ell = ell;
  std::vector<Triplet> triplets;
  for (int row = 0; row < nc; ++row) {
    const Corrector& corrector = correctors[static_cast<std::size_t>(row)];
    for (SparseMatRM::InnerIterator it(space.lambda_rm, row); it; ++it)
      triplets.emplace_back(static_cast<int>(it.col()), row, it.value());
    for (std::size_t q = 0; q < corrector.patch.size(); ++q) {
      const double v = corrector.values[static_cast<int>(q)];
      if (v != 0.0) triplets.emplace_back(corrector.patch[q], row, -v);
    }
    basis.max_constraint_norm =
        std::max(basis.max_constraint_norm, corrector.constraint_norm);
    basis.max_residual_norm =
        std::max(basis.max_residual_norm, corrector.residual_norm);
  }
  basis.psi.resize(K.rows(), nc);
  basis.psi.setFromTriplets(triplets.begin(), triplets.end());
  basis.psi.makeCompressed();
  return basis;
}

MultiscaleSolution solve_multiscale(const StiffnessSystem& system,
                                    const MultiscaleBasis& basis) {
  const Eigen::VectorXd prescribed = system.prescribed_vector();
  const Eigen::VectorXd f_eff = system.F - system.K * prescribed;
  const Eigen::VectorXd rhs = basis.psi.transpose() * f_eff;

  SparseMat A = SparseMat(basis.psi.transpose()) * (system.K * basis.psi);
  A.makeCompressed();
  const double scale = matrix_scale(A);
  if (!(scale > 0.0)) throw numerical_error("coarse system is zero");
  SparseMat At = SparseMat(A.transpose());
  MultiscaleSolution solution;
  solution.coarse_asymmetry = matrix_scale(A - At) / scale;
  if (solution.coarse_asymmetry > 1e-12)
    throw numerical_error("coarse matrix asymmetry " +
                          std::to_string(solution.coarse_asymmetry) +
                          " (basis/constraint mismatch)");
  A = 0.5 * (A + At);

  ScaledLdlt ldlt(A);
  if (!ldlt.positive_definite())
    throw numerical_error("coarse matrix is not positive definite");
  solution.coarse = ldlt.solve(rhs);
  solution.u = prescribed + basis.psi * solution.coarse;
  return solution;
}

} // namespace fibernet
