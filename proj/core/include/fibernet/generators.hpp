#pragma once

#include "fibernet/network.hpp"

#include <cstdint>
#include <string>

namespace fibernet {

/// Which incident-edge pairs become EdgePairs at a grid node.
enum class PairRule { all, collinear, perpendicular };

PairRule pair_rule_from_name(const std::string& name);
std::string pair_rule_name(PairRule rule);

/// Equidistant grid on [0, domain_side]^2 with m_fine cells per side.
Network generate_structured(int m_fine, double domain_side,
                            PairRule rule = PairRule::all);

/// Structured grid with interior nodes displaced uniformly in
/// [-magnitude*h, magnitude*h]^2; boundary nodes slide tangentially,
/// corners stay fixed. magnitude must be < 0.5.
Network generate_perturbed(int m_fine, double domain_side, double magnitude,
                           std::uint64_t seed, PairRule rule = PairRule::all);

struct FiberParams {
  int fiber_count = 64;
  double fiber_length = 0.0;  // <= 0: use 0.4 * domain_side
  int segments_per_fiber = 2; // edges per fiber before splitting
  int target_nodes = 0;       // > 0: adjust fiber_count toward this count
  int max_bond_pairs = 4;     // bond pairs per crossing fiber pair at a node
  // Crossings closer than this to an existing node fuse into one joint.
  // Physically, contacts within a fiber width share one bond region; the
  // fused spacing also bounds edge lengths away from zero, keeping the
  // stiffness matrix solvable at realistic fiber coefficients.
  double merge_radius = 0.0; // <= 0: use 1e-3 * domain_side
};

/// Straight fibers with uniform random midpoint and orientation, clipped to
/// the domain; pairwise intersections become shared nodes that split both
/// fibers. The result is pruned; fails if the surviving component does not
/// touch all four boundary sides.
Network generate_fiber_network(double domain_side, const FiberParams& params,
                               std::uint64_t seed);

/// One straight fiber given by its endpoints inside the domain square.
struct FiberSegment {
  Vec2 p0, p1;
};

/// Builds the network for explicitly placed fibers: every pairwise crossing
/// becomes a shared node splitting both fibers, consecutive segments of one
/// fiber get an intra-fiber pair, crossings get inter-fiber bond pairs.
/// No pruning and no boundary-coverage check; merge_radius <= 0 keeps only
/// the geometric snap tolerance.
Network build_fiber_network(double domain_side,
                            const std::vector<FiberSegment>& fibers,
                            int segments_per_fiber = 1, int max_bond_pairs = 4,
                            double merge_radius = 0.0, std::uint64_t seed = 0);

struct PruneReport {
  int removed_nodes = 0;
  int removed_edges = 0;
  int removed_pairs = 0;
  int removed_components = 0;
  int removed_chain_nodes = 0;
};

/// Keeps the largest connected component and iteratively removes degree-1
/// chains whose terminal edge is in no edge pair (zero-stiffness
/// mechanisms). Reindexes ids densely.
PruneReport prune(Network& network);

/// Relative geometric tolerance: crossings closer than this (times
/// domain_side) to an existing node snap to it.
inline constexpr double kGeomEps = 1e-9;
/// Relative boundary tolerance for tagging nodes on domain sides.
inline constexpr double kBoundaryEps = 1e-6;

} // namespace fibernet
