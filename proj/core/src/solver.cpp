#include "fibernet/solver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>

namespace fibernet {

double matrix_scale(const SparseMat& A) {
  double scale = 0.0;
  for (int outer = 0; outer < A.outerSize(); ++outer)
    for (SparseMat::InnerIterator it(A, outer); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  return scale;
}

SparseMat submatrix(const SparseMat& A, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  std::vector<int> row_map(static_cast<std::size_t>(A.rows()), -1);
  for (std::size_t r = 0; r < rows.size(); ++r)
    row_map[static_cast<std::size_t>(rows[r])] = static_cast<int>(r);
  std::vector<Triplet> triplets;
  for (std::size_t q = 0; q < cols.size(); ++q) {
    for (SparseMat::InnerIterator it(A, cols[q]); it; ++it) {
      const int r = row_map[static_cast<std::size_t>(it.row())];
      if (r >= 0) triplets.emplace_back(r, static_cast<int>(q), it.value());
    }
  }
  SparseMat S(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  S.setFromTriplets(triplets.begin(), triplets.end());
  S.makeCompressed();
  return S;
}

ScaledLdlt::ScaledLdlt(const SparseMat& A) {
  const Eigen::VectorXd diag = A.diagonal();
  inv_scale_.resize(diag.size());
  for (int i = 0; i < diag.size(); ++i)
    inv_scale_[i] = diag[i] > 0.0 ? 1.0 / std::sqrt(diag[i]) : 1.0;
  const SparseMat scaled =
      inv_scale_.asDiagonal() * A * inv_scale_.asDiagonal();
  ldlt_.compute(scaled);
}

bool ScaledLdlt::positive_definite() const {
  return ldlt_.info() == Eigen::Success && ldlt_.vectorD().minCoeff() > 0.0;
}

Eigen::VectorXd ScaledLdlt::solve(const Eigen::VectorXd& b) const {
  return inv_scale_.asDiagonal() *
         ldlt_.solve(inv_scale_.asDiagonal() * b).eval();
}

Eigen::MatrixXd ScaledLdlt::solve_block(const Eigen::MatrixXd& b) const {
  return inv_scale_.asDiagonal() *
         ldlt_.solve(inv_scale_.asDiagonal() * b).eval();
}

ReferenceSolution solve_reference(const StiffnessSystem& system) {
  const Eigen::VectorXd prescribed = system.prescribed_vector();

  SparseMat Kff = submatrix(system.K, system.free, system.free);
  Eigen::VectorXd lift = system.K * prescribed;
  Eigen::VectorXd b(static_cast<int>(system.free.size()));
  for (std::size_t r = 0; r < system.free.size(); ++r) {
    const int dof = system.free[r];
    b[static_cast<int>(r)] = system.F[dof] - lift[dof];
  }

  ReferenceSolution result;
  result.u = prescribed;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return result; // zero data, zero response

  ScaledLdlt ldlt(Kff);
  if (!ldlt.positive_definite())
    throw numerical_error("free-dof stiffness is not positive definite");

  Eigen::VectorXd x = ldlt.solve(b);
  double residual = (Kff * x - b).norm() / bnorm;
  for (int pass = 0; pass < 4 && residual > 1e-12; ++pass) {
    const Eigen::VectorXd correction = ldlt.solve(b - Kff * x);
    const Eigen::VectorXd candidate = x + correction;
    const double improved = (Kff * candidate - b).norm() / bnorm;
    if (improved >= residual) break;
    x = candidate;
    residual = improved;
  }
  if (!(residual <= 1e-10))
    throw numerical_error("reference solve residual " + std::to_string(residual) +
                          " violates the 1e-10 contract");

  for (std::size_t r = 0; r < system.free.size(); ++r)
    result.u[system.free[r]] = x[static_cast<int>(r)];
  result.residual = residual;
  return result;
}

} // namespace fibernet
