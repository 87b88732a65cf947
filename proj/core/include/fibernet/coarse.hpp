#pragma once

#include "fibernet/network.hpp"
#include "fibernet/types.hpp"

#include <vector>

namespace fibernet {

/// Equidistant square coarse grid over the network domain. Coarse node id
/// cn = cj*(m+1) + ci; coarse element el = ey*m + ex.
struct CoarseGrid {
  int m = 0;
  double H = 0.0;
  double domain_side = 0.0;
  std::vector<std::vector<int>> element_nodes; // element -> network node ids

  int coarse_node_count() const { return (m + 1) * (m + 1); }
  int coarse_dof_count() const { return 2 * coarse_node_count(); }
  Vec2 coarse_position(int coarse_node) const {
    const int ci = coarse_node % (m + 1);
    const int cj = coarse_node / (m + 1);
    return Vec2(ci == m ? domain_side : ci * H, cj == m ? domain_side : cj * H);
  }
};

/// Builds the grid and the element-to-node map. Nodes on shared element
/// edges go to the lower-index element.
CoarseGrid build_coarse_grid(const Network& net, int m);

/// Bilinear shape values of every coarse dof at every network dof; rows are
/// the 2*(m+1)^2 coarse dofs (x rows act on x dofs, y on y).
struct ShapeMatrix {
  SparseMat lambda; // coarse dofs x network dofs
};

ShapeMatrix evaluate_shape_functions(const CoarseGrid& grid, const Network& net);

/// The working coarse operator: columns zeroed on constrained dofs, rows
/// with no remaining support dropped. kept[r] is the original coarse dof of
/// row r.
struct CoarseSpace {
  SparseMat lambda;      // kept rows x network dofs
  SparseMatRM lambda_rm; // same matrix, row-major (for row slicing)
  std::vector<int> kept;

  int coarse_dim() const { return static_cast<int>(kept.size()); }
};

CoarseSpace restrict_to_free(const ShapeMatrix& shape,
                             const std::vector<char>& free_mask);

} // namespace fibernet
