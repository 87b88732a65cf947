#include "fibernet/coarse.hpp"

#include <algorithm>
#include <cmath>

namespace fibernet {

namespace {

// Element index along one axis with nodes on grid lines assigned to the
// lower element.
int element_index(double x, double H, int m) {
  const int e = static_cast<int>(std::ceil(x / H)) - 1;
  return std::clamp(e, 0, m - 1);
}

} // namespace

CoarseGrid build_coarse_grid(const Network& net, int m) {
  if (m < 2) throw config_error("coarse size m must be at least 2");
  CoarseGrid grid;
  grid.m = m;
  grid.domain_side = net.domain_side;
  grid.H = net.domain_side / m;
  grid.element_nodes.assign(static_cast<std::size_t>(m) * m, {});
  for (int node = 0; node < net.node_count(); ++node) {
    const Vec2& p = net.nodes[static_cast<std::size_t>(node)].position;
    if (p.x() < 0.0 || p.x() > net.domain_side || p.y() < 0.0 ||
        p.y() > net.domain_side)
      throw numerical_error("network node outside the domain square");
    const int ex = element_index(p.x(), grid.H, m);
    const int ey = element_index(p.y(), grid.H, m);
    grid.element_nodes[static_cast<std::size_t>(ey) * m + ex].push_back(node);
  }
  return grid;
}

ShapeMatrix evaluate_shape_functions(const CoarseGrid& grid, const Network& net) {
  const int m = grid.m;
  std::vector<Triplet> triplets;
  triplets.reserve(8 * static_cast<std::size_t>(net.node_count()));
  for (int node = 0; node < net.node_count(); ++node) {
    const Vec2& p = net.nodes[static_cast<std::size_t>(node)].position;
    const int ex = element_index(p.x(), grid.H, m);
    const int ey = element_index(p.y(), grid.H, m);
    const double fx = std::clamp(p.x() / grid.H - ex, 0.0, 1.0);
    const double fy = std::clamp(p.y() / grid.H - ey, 0.0, 1.0);
    const double values[4] = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy),
                              (1.0 - fx) * fy, fx * fy};
    const int corners[4] = {ey * (m + 1) + ex, ey * (m + 1) + ex + 1,
                            (ey + 1) * (m + 1) + ex, (ey + 1) * (m + 1) + ex + 1};
    for (int c = 0; c < 4; ++c) {
      if (values[c] == 0.0) continue;
      for (int axis = 0; axis < 2; ++axis)
        triplets.emplace_back(2 * corners[c] + axis, 2 * node + axis, values[c]);
    }
  }
  ShapeMatrix shape;
  shape.lambda.resize(grid.coarse_dof_count(), net.dof_count());
  shape.lambda.setFromTriplets(triplets.begin(), triplets.end());
  shape.lambda.makeCompressed();
  return shape;
}

CoarseSpace restrict_to_free(const ShapeMatrix& shape,
                             const std::vector<char>& free_mask) {
  const SparseMatRM rm(shape.lambda);
  std::vector<Triplet> triplets;
  std::vector<int> kept;
  for (int row = 0; row < rm.rows(); ++row) {
    bool any = false;
    for (SparseMatRM::InnerIterator it(rm, row); it; ++it) {
      if (free_mask[static_cast<std::size_t>(it.col())]) {
        any = true;
        break;
      }
    }
    if (!any) continue;
    const int r = static_cast<int>(kept.size());
    kept.push_back(row);
    for (SparseMatRM::InnerIterator it(rm, row); it; ++it)
      if (free_mask[static_cast<std::size_t>(it.col())])
        triplets.emplace_back(r, static_cast<int>(it.col()), it.value());
  }
  CoarseSpace space;
  space.lambda.resize(static_cast<int>(kept.size()), shape.lambda.cols());
  space.lambda.setFromTriplets(triplets.begin(), triplets.end());
  space.lambda.makeCompressed();
  space.lambda_rm = SparseMatRM(space.lambda);
  space.kept = std::move(kept);
  return space;
}

} // namespace fibernet
