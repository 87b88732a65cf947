#pragma once

#include "fibernet/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace fibernet {

/// Which boundary sides of the domain square a node touches (bitmask).
namespace side {
inline constexpr std::uint8_t left = 1;
inline constexpr std::uint8_t right = 2;
inline constexpr std::uint8_t bottom = 4;
inline constexpr std::uint8_t top = 8;
} // namespace side

struct Node {
  Vec2 position{0.0, 0.0};
  std::uint8_t sides = 0; // 0 = interior
};

/// Tag string for a side mask: interior, left, right, bottom, top, corner.
std::string boundary_tag(std::uint8_t sides);
std::uint8_t sides_from_tag(const std::string& tag);

/// Side mask of a position, using the relative tolerance eps_b.
std::uint8_t classify_sides(const Vec2& p, double domain_side, double eps_b = 1e-6);

struct Edge {
  int i = -1, j = -1; // node ids
  double k = 0.0;     // extension stiffness [Pa]
  double a = 0.0;     // cross-section area [m^2]
  double w = 0.0;     // width [m]
  int fiber = -1;     // generating fiber id, -1 for grid networks
};

enum class PairKind { intra_fiber, inter_fiber_bond };

std::string pair_kind_name(PairKind kind);
PairKind pair_kind_from_name(const std::string& name);

/// Two edges sharing a center node; carries angular and Poisson stiffness.
struct EdgePair {
  int e1 = -1, e2 = -1; // edge ids, both incident to `center`
  int center = -1;      // shared node id
  double kappa = 0.0;   // angular stiffness [Pa]
  double volume = 0.0;  // connection volume [m^3]
  double eta = 0.0;     // Poisson coefficient (scale on Pa)
  double gamma = 0.0;   // Poisson coefficient (dimensionless)
  PairKind kind = PairKind::intra_fiber;
};

struct Network {
  double domain_side = 1.0; // domain [0, s]^2
  std::uint64_t seed = 0;
  std::string generator; // structured | perturbed | fiber
  std::string scheme;    // coefficient scheme, empty until assigned

  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<EdgePair> pairs;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int dof_count() const { return 2 * node_count(); }

  double edge_length(int e) const;
  /// Unit direction of edge e from node `from` toward the opposite end.
  Vec2 edge_dir_from(int e, int from) const;
  /// The endpoint of edge e that is not `node`.
  int opposite_node(int e, int node) const;
  /// Outer nodes (i, l) of a pair: the non-center endpoints of e1 and e2.
  std::pair<int, int> outer_nodes(const EdgePair& pair) const;

  /// node id -> incident edge ids, in edge-id order.
  std::vector<std::vector<int>> incidence() const;

  /// Checks structural invariants; throws numerical_error on violation.
  void validate() const;
};

struct ValueRange {
  double lo = 0.0, hi = 0.0;
  bool fixed() const { return lo == hi; }
};

/// One full set of edge and edge-pair coefficients. volume <= 0 means
/// "derive": V = w_e1 * w_e2 * thickness. Defaults model slender fibers
/// (width 2e-3 of the unit domain, square cross-section), which keeps the
/// extension terms dominant over the angular ones at the default densities.
struct CoefficientSet {
  double k = 1.0;
  double a = 4e-6;
  double w = 2e-3;
  double kappa = 1.0;
  double volume = 0.0;
  double eta = 0.3;
  double gamma = 0.3;
};

struct HomogeneousScheme {
  CoefficientSet values;
  double thickness = 2e-3;
};

struct RandomUniformScheme {
  ValueRange k{1.0, 10.0};
  ValueRange a{4e-6, 4e-6};
  ValueRange w{2e-3, 2e-3};
  ValueRange kappa{1.0, 10.0};
  ValueRange volume{0.0, 0.0}; // unset -> derived from widths
  ValueRange eta{0.3, 0.3};
  ValueRange gamma{0.3, 0.3};
  double thickness = 2e-3;
};

/// Distinct values for intra-fiber pairs and inter-fiber bonds, optionally
/// randomized by a multiplicative factor drawn per edge / pair. Defaults are
/// sized like cellulose fibers on a centimeter sheet: 3 GPa moduli, 20 um
/// width, 5 um thickness, bonds an order of magnitude softer in rotation.
struct FiberScheme {
  CoefficientSet intra{3e9, 1e-10, 2e-5, 3e9, 0.0, 0.3, 0.3};
  CoefficientSet bond{3e9, 1e-10, 2e-5, 3e8, 0.0, 0.3, 0.3};
  double thickness = 5e-6;
  ValueRange factor{1.0, 1.0};
};

using CoefficientScheme =
    std::variant<HomogeneousScheme, RandomUniformScheme, FiberScheme>;

std::string scheme_name(const CoefficientScheme& scheme);

/// Assigns edge and edge-pair coefficients in place per the scheme.
/// Deterministic under seed. Throws config_error on invalid ranges.
void assign_coefficients(Network& network, const CoefficientScheme& scheme,
                         std::uint64_t seed);

} // namespace fibernet
