#pragma once

#include "fibernet/assembly.hpp"
#include <Eigen/SparseCholesky>

#include "fibernet/types.hpp"

#include <vector>

namespace fibernet {

/// A(rows, cols) as a fresh sparse matrix. Index lists must be ascending.
SparseMat submatrix(const SparseMat& A, const std::vector<int>& rows,
                    const std::vector<int>& cols);

/// SimplicialLDLT behind symmetric Jacobi equilibration: factors
/// D^-1 A D^-1 with D = sqrt(diag A). Keeps the factorization usable when
/// edge lengths (hence stiffness entries) span many orders of magnitude, as
/// they do on unordered fiber networks.
class ScaledLdlt {
public:
  explicit ScaledLdlt(const SparseMat& A);

  bool positive_definite() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve_block(const Eigen::MatrixXd& b) const;

private:
  Eigen::VectorXd inv_scale_; // D^-1 entries
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

struct ReferenceSolution {
  Eigen::VectorXd u;     // full length; constrained dofs carry their values
  double residual = 0.0; // relative residual of the free-dof system
};

/// Exact solve by sparse LDL^T factorization with iterative refinement.
/// Inhomogeneous constraints are lifted: the free system right-hand side is
/// F - K u_prescribed restricted to free dofs. Fails if the free block is
/// not positive definite or the relative residual stays above 1e-10.
ReferenceSolution solve_reference(const StiffnessSystem& system);

} // namespace fibernet
