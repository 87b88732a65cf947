#include "fibernet/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace fibernet {

Eigen::VectorXd StiffnessSystem::prescribed_vector() const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dof_count());
  for (const auto& [dof, value] : constrained) u[dof] = value;
  return u;
}

std::vector<char> StiffnessSystem::free_mask() const {
  std::vector<char> mask(static_cast<std::size_t>(dof_count()), 0);
  for (int dof : free) mask[static_cast<std::size_t>(dof)] = 1;
  return mask;
}

std::string problem_name(ProblemSpec::Kind kind) {
  return kind == ProblemSpec::Kind::fixed_boundary_force ? "force" : "displace";
}

ProblemSpec::Kind problem_from_name(const std::string& name) {
  if (name == "force") return ProblemSpec::Kind::fixed_boundary_force;
  if (name == "displace") return ProblemSpec::Kind::displaced_right_boundary;
  throw config_error("unknown problem kind: " + name + " (use force|displace)");
}

namespace {

Vec2 rot90(const Vec2& v) { return Vec2(-v.y(), v.x()); }

void require_length(double L, const char* what) {
  if (!(L > 0.0)) throw numerical_error(std::string("zero-length edge in ") + what);
}

} // namespace

Mat4 edge_extension_block(const Network& net, const Edge& edge) {
  const Vec2 delta = net.nodes[static_cast<std::size_t>(edge.j)].position -
                     net.nodes[static_cast<std::size_t>(edge.i)].position;
  const double L = delta.norm();
  require_length(L, "edge extension");
  const Vec2 d = delta / L;
  const double s = edge.k * edge.a / L;
  const Eigen::Matrix2d D = s * (d * d.transpose());
  Mat4 block;
  block.block<2, 2>(0, 0) = D;
  block.block<2, 2>(0, 2) = -D;
  block.block<2, 2>(2, 0) = -D;
  block.block<2, 2>(2, 2) = D;
  return block;
}

Vec6 angular_gradient(const Network& net, const EdgePair& pair) {
  const auto [i, l] = net.outer_nodes(pair);
  const int j = pair.center;
  const Vec2 di = net.edge_dir_from(pair.e1, j);
  const Vec2 dl = net.edge_dir_from(pair.e2, j);
  const double Li = net.edge_length(pair.e1);
  const double Ll = net.edge_length(pair.e2);
  require_length(Li, "angular deviation");
  require_length(Ll, "angular deviation");
  (void)i;
  (void)l;
  // Opposite rotational senses on the two arms make rigid rotations angle
  // preserving.
  const Vec2 gi = rot90(di) / Li;
  const Vec2 gl = -rot90(dl) / Ll;
  Vec6 g;
  g.segment<2>(0) = gi;
  g.segment<2>(2) = -(gi + gl);
  g.segment<2>(4) = gl;
  return g;
}

Mat6 angular_deviation_block(const Network& net, const EdgePair& pair) {
  const Vec6 g = angular_gradient(net, pair);
  return pair.kappa * pair.volume * (g * g.transpose());
}

Mat6 poisson_block(const Network& net, const EdgePair& pair) {
  const int j = pair.center;
  const Vec2 di = net.edge_dir_from(pair.e1, j);
  const Vec2 dl = net.edge_dir_from(pair.e2, j);
  const double Li = net.edge_length(pair.e1);
  const double Ll = net.edge_length(pair.e2);
  require_length(Li, "poisson effect");
  require_length(Ll, "poisson effect");
  const Edge& e1 = net.edges[static_cast<std::size_t>(pair.e1)];
  const Edge& e2 = net.edges[static_cast<std::size_t>(pair.e2)];

  // Elongation functionals measured from the center node: delta = g . u.
  Vec6 gi = Vec6::Zero(), gl = Vec6::Zero();
  gi.segment<2>(0) = di;
  gi.segment<2>(2) = -di;
  gl.segment<2>(4) = dl;
  gl.segment<2>(2) = -dl;

  const double c = std::abs(rot90(di).dot(dl)); // |sin| of the pair angle
  const double eta = pair.eta;
  const double gamma = pair.gamma;

  Mat6 block = Mat6::Zero();
  block += eta * (e1.a / Li) * (gi * gi.transpose());
  block += eta * (e2.a / Ll) * (gl * gl.transpose());
  const double cross = eta * gamma * c / (2.0 * Li * Ll);
  block += cross * e1.a * e2.w * (gi * gl.transpose());
  block += cross * e2.a * e1.w * (gl * gi.transpose());
  return block;
}

namespace {

void scatter_pair(std::vector<Triplet>& triplets, const Mat6& block, int i,
                  int j, int l) {
  const int dofs[6] = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1, 2 * l, 2 * l + 1};
  for (int r = 0; r < 6; ++r)
    for (int q = 0; q < 6; ++q)
      if (block(r, q) != 0.0) triplets.emplace_back(dofs[r], dofs[q], block(r, q));
}

} // namespace

StiffnessSystem assemble_stiffness(const Network& net,
                                   const AssemblyOptions& options) {
  const int n2 = net.dof_count();
  std::vector<Triplet> triplets;
  triplets.reserve(16 * net.edges.size() + 72 * net.pairs.size());

  for (const Edge& edge : net.edges) {
    const Mat4 block = edge_extension_block(net, edge);
    const int dofs[4] = {2 * edge.i, 2 * edge.i + 1, 2 * edge.j, 2 * edge.j + 1};
    for (int r = 0; r < 4; ++r)
      for (int q = 0; q < 4; ++q)
        if (block(r, q) != 0.0) triplets.emplace_back(dofs[r], dofs[q], block(r, q));
  }

  int dropped = 0;
  for (const EdgePair& pair : net.pairs) {
    const auto [i, l] = net.outer_nodes(pair);
    const int j = pair.center;
    const Vec2 di = net.edge_dir_from(pair.e1, j);
    const Vec2 dl = net.edge_dir_from(pair.e2, j);
    // Overlapping arms (same outer node, or snapped collinear duplicates)
    // carry no usable angle.
    if (i == l || di.dot(dl) > 1.0 - 1e-12) {
      ++dropped;
      continue;
    }
    if (pair.kappa > 0.0 && pair.volume > 0.0)
      scatter_pair(triplets, angular_deviation_block(net, pair), i, j, l);
    if (pair.eta > 0.0)
      scatter_pair(triplets, poisson_block(net, pair), i, j, l);
  }

  StiffnessSystem system;
  system.K.resize(n2, n2);
  system.K.setFromTriplets(triplets.begin(), triplets.end());
  system.K.makeCompressed();

  const double scale = matrix_scale(system.K);
  if (!(scale > 0.0)) throw numerical_error("assembled stiffness is zero");
  {
    SparseMat Kt = SparseMat(system.K.transpose());
    SparseMat skew = system.K - Kt;
    system.relative_asymmetry = matrix_scale(skew) / scale;
    if (system.relative_asymmetry > options.asymmetry_gate)
      throw numerical_error(
          "stiffness asymmetry " + std::to_string(system.relative_asymmetry) +
          " exceeds gate " + std::to_string(options.asymmetry_gate) +
          "; sign-convention bug suspected");
    system.K = 0.5 * (system.K + Kt);
    system.K.makeCompressed();
  }
  system.dropped_pairs = dropped;

  system.F = Eigen::VectorXd::Zero(n2);
  system.free.resize(static_cast<std::size_t>(n2));
  for (int d = 0; d < n2; ++d) system.free[static_cast<std::size_t>(d)] = d;
  return system;
}

void build_problem(const Network& net, StiffnessSystem& system,
                   const ProblemSpec& spec) {
  if (system.dof_count() != net.dof_count())
    throw config_error("stiffness system does not match the network");

  std::uint8_t seen = 0;
  for (const Node& node : net.nodes) seen |= node.sides;
  for (std::uint8_t s : {side::left, side::right, side::bottom, side::top}) {
    if (!(seen & s))
      throw config_error("no nodes tagged on the " + boundary_tag(s) +
                         " boundary; problem is ill-posed");
  }

  system.constrained.clear();
  system.F.setZero();

  if (spec.kind == ProblemSpec::Kind::fixed_boundary_force) {
    if (!(spec.force_scale > 0.0))
      throw config_error("force_scale must be positive");
    for (int node = 0; node < net.node_count(); ++node) {
      if (net.nodes[static_cast<std::size_t>(node)].sides == 0) continue;
      system.constrained[2 * node] = 0.0;
      system.constrained[2 * node + 1] = 0.0;
    }
    const double mean_diag = system.K.diagonal().mean();
    const double s = spec.force_scale * mean_diag * net.domain_side;
    const double component = s / std::sqrt(2.0);
    for (int node = 0; node < net.node_count(); ++node) {
      if (net.nodes[static_cast<std::size_t>(node)].sides != 0) continue;
      system.F[2 * node] = component;
      system.F[2 * node + 1] = component;
    }
  } else {
    if (!(spec.displacement_fraction > 0.0))
      throw config_error("displacement_fraction must be positive");
    const double shift = spec.displacement_fraction * net.domain_side;
    for (int node = 0; node < net.node_count(); ++node) {
      const std::uint8_t sides = net.nodes[static_cast<std::size_t>(node)].sides;
      if ((sides & side::left) && (sides & side::right))
        throw config_error("node touches both left and right boundaries");
      if (sides & side::left) {
        system.constrained[2 * node] = 0.0;
        system.constrained[2 * node + 1] = 0.0;
      } else if (sides & side::right) {
        system.constrained[2 * node] = shift;
        system.constrained[2 * node + 1] = 0.0;
      }
    }
  }

  system.free.clear();
  for (int d = 0; d < system.dof_count(); ++d)
    if (!system.constrained.count(d)) system.free.push_back(d);
  if (system.free.empty()) throw config_error("no free dofs remain");
}

} // namespace fibernet
