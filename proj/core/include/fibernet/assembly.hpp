#pragma once

#include "fibernet/network.hpp"
#include "fibernet/types.hpp"

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace fibernet {

using Mat4 = Eigen::Matrix4d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// The algebraic problem: stiffness operator, load, and constraints over the
/// interleaved dof layout (x0, y0, x1, y1, ...).
struct StiffnessSystem {
  SparseMat K;
  Eigen::VectorXd F;                 // zero until a problem is applied
  std::map<int, double> constrained; // dof -> prescribed displacement [m]
  std::vector<int> free;             // ascending; all dofs until constrained

  double relative_asymmetry = 0.0; // pre-symmetrization, diagnostic
  int dropped_pairs = 0;           // degenerate pairs skipped at assembly

  int dof_count() const { return static_cast<int>(K.rows()); }
  bool is_constrained(int dof) const { return constrained.count(dof) != 0; }
  /// Full-length vector of prescribed values (zero on free dofs).
  Eigen::VectorXd prescribed_vector() const;
  /// Mask over dofs, 1 = free.
  std::vector<char> free_mask() const;
};

struct ProblemSpec {
  enum class Kind { fixed_boundary_force, displaced_right_boundary };
  Kind kind = Kind::fixed_boundary_force;
  double force_scale = 1e-3;           // c_F, fixed-boundary force problem
  double displacement_fraction = 0.10; // displaced right boundary
};

std::string problem_name(ProblemSpec::Kind kind);
ProblemSpec::Kind problem_from_name(const std::string& name);

// Element blocks. Pair blocks act on the stacked dofs of (i, j, l) where j is
// the center node and (i, l) the outer nodes, in the order (xi, yi, xj, yj,
// xl, yl).

/// Extension spring along the edge axis: s * [[D, -D], [-D, D]] over the dofs
/// of (i, j), s = k_e a_e / L_e, D = d d^T. Symmetric PSD of rank 1.
Mat4 edge_extension_block(const Network& net, const Edge& edge);

/// Gradient g of the linearized angle deviation: delta_theta = g . u.
/// Outer-node entries are the rotated edge directions over the edge lengths;
/// the center entry balances them (rigid motions give zero).
Vec6 angular_gradient(const Network& net, const EdgePair& pair);

/// kappa * V * g g^T for the angular gradient g. Symmetric PSD of rank 1.
Mat6 angular_deviation_block(const Network& net, const EdgePair& pair);

/// Poisson coupling of the two edge elongations measured from the center
/// node. Raw block; symmetric only when a_e1 w_e2 = a_e2 w_e1, handled by the
/// global symmetrization step.
Mat6 poisson_block(const Network& net, const EdgePair& pair);

struct AssemblyOptions {
  /// Hard gate on the pre-symmetrization relative asymmetry of K. Exceeding
  /// it indicates a sign bug, not the benign Poisson cross-term mismatch.
  double asymmetry_gate = 1e-6;
};

/// Assembles K from all edges and pairs, symmetrizes, and records
/// diagnostics. F and constraints are left empty.
StiffnessSystem assemble_stiffness(const Network& net,
                                   const AssemblyOptions& options = {});

/// Fills F, constrained, and free for one of the two boundary-value
/// problems. Requires every boundary side to carry at least one node.
void build_problem(const Network& net, StiffnessSystem& system,
                   const ProblemSpec& spec);

} // namespace fibernet
