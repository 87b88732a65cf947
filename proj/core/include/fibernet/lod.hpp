#pragma once

#include "fibernet/assembly.hpp"
#include "fibernet/coarse.hpp"
#include "fibernet/network.hpp"
#include "fibernet/types.hpp"

#include <vector>

namespace fibernet {

/// Localization radius ell = factor * H * log(m) in the requested base
/// (natural log by default).
double localization_radius(double H, int m, double factor = 1.5,
                           double log_base = 2.718281828459045);

struct Patch {
  std::vector<int> dofs; // free dofs within the ball, ascending
  std::vector<int> rows; // coarse-space rows with support among dofs
};

/// Ball patch around the coarse node of coarse-space row `row`: free dofs of
/// all nodes within Euclidean distance ell, plus every coarse row whose
/// shape support intersects the patch (they carry the W-constraint).
Patch compute_patch(const Network& net, const CoarseGrid& grid,
                    const CoarseSpace& space, const std::vector<char>& free_mask,
                    int row, double ell);

/// Fine-scale modification phi_i of one coarse shape function, supported on
/// its patch.
struct Corrector {
  int coarse_dof = -1;          // original coarse dof id
  std::vector<int> patch;       // dof ids carrying `values`
  Eigen::VectorXd values;       // phi on patch dofs
  double residual_norm = 0.0;   // relative saddle-point residual
  double constraint_norm = 0.0; // ||C phi|| / ||phi||
};

/// Solves the saddle-point corrector problem on the patch:
///   K_P phi + C^T mu = (K lambda_i)|_P,  C phi = 0,
/// with C the coarse rows restricted to the patch. The multiplier system is
/// solved by a rank-revealing least-squares factorization because patch
/// restriction can make constraint rows linearly dependent (consistently).
Corrector solve_corrector(const SparseMat& K, const CoarseSpace& space, int row,
                          const Patch& patch);

struct MultiscaleBasis {
  SparseMat psi; // network dofs x coarse dim, columns psi_i = lambda_i - phi_i
  double ell = 0.0;
  double max_constraint_norm = 0.0;
  double max_residual_norm = 0.0;

  int coarse_dim() const { return static_cast<int>(psi.cols()); }
};

/// Runs all corrector solves (in parallel) and assembles Psi. Output is
/// bit-identical for any thread count.
MultiscaleBasis build_multiscale_basis(const Network& net, const CoarseGrid& grid,
                                       const CoarseSpace& space,
                                       const SparseMat& K,
                                       const std::vector<char>& free_mask,
                                       double ell, int threads = 0);

struct MultiscaleSolution {
  Eigen::VectorXd u;        // full length, prescribed values included
  Eigen::VectorXd coarse;   // coefficients c of u_ms - lifting in Psi
  double coarse_asymmetry = 0.0;
};

/// Galerkin solve on the multiscale space: (Psi^T K Psi) c = Psi^T F_eff,
/// u = lifting + Psi c. The coarse matrix must be symmetric positive
/// definite.
MultiscaleSolution solve_multiscale(const StiffnessSystem& system,
                                    const MultiscaleBasis& basis);

} // namespace fibernet
