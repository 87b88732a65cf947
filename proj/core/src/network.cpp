#include "fibernet/network.hpp"

#include "fibernet/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <utility>

namespace fibernet {

std::string boundary_tag(std::uint8_t sides) {
  if (sides == 0) return "interior";
  if (std::popcount(sides) > 1) return "corner";
  switch (sides) {
    case side::left: return "left";
    case side::right: return "right";
    case side::bottom: return "bottom";
    case side::top: return "top";
  }
  return "interior";
}

std::uint8_t sides_from_tag(const std::string& tag) {
  if (tag == "interior") return 0;
  if (tag == "left") return side::left;
  if (tag == "right") return side::right;
  if (tag == "bottom") return side::bottom;
  if (tag == "top") return side::top;
  if (tag == "corner") return side::left | side::bottom; // placeholder mask
  throw io_error("unknown boundary tag: " + tag);
}

std::uint8_t classify_sides(const Vec2& p, double domain_side, double eps_b) {
  const double eps = eps_b * domain_side;
  std::uint8_t mask = 0;
  if (p.x() <= eps) mask |= side::left;
  if (p.x() >= domain_side - eps) mask |= side::right;
  if (p.y() <= eps) mask |= side::bottom;
  if (p.y() >= domain_side - eps) mask |= side::top;
  return mask;
}

std::string pair_kind_name(PairKind kind) {
  return kind == PairKind::intra_fiber ? "intra_fiber" : "inter_fiber_bond";
}

PairKind pair_kind_from_name(const std::string& name) {
  if (name == "intra_fiber") return PairKind::intra_fiber;
  if (name == "inter_fiber_bond") return PairKind::inter_fiber_bond;
  throw io_error("unknown edge pair kind: " + name);
}

double Network::edge_length(int e) const {
  const Edge& ed = edges[static_cast<std::size_t>(e)];
  return (nodes[static_cast<std::size_t>(ed.j)].position -
          nodes[static_cast<std::size_t>(ed.i)].position)
      .norm();
}

Vec2 Network::edge_dir_from(int e, int from) const {
  const Edge& ed = edges[static_cast<std::size_t>(e)];
  const int to = ed.i == from ? ed.j : ed.i;
  Vec2 d = nodes[static_cast<std::size_t>(to)].position -
           nodes[static_cast<std::size_t>(from)].position;
  const double len = d.norm();
  if (!(len > 0.0)) throw numerical_error("zero-length edge " + std::to_string(e));
  return d / len;
}

int Network::opposite_node(int e, int node) const {
  const Edge& ed = edges[static_cast<std::size_t>(e)];
  return ed.i == node ? ed.j : ed.i;
}

std::pair<int, int> Network::outer_nodes(const EdgePair& pair) const {
  return {opposite_node(pair.e1, pair.center), opposite_node(pair.e2, pair.center)};
}

std::vector<std::vector<int>> Network::incidence() const {
  std::vector<std::vector<int>> inc(nodes.size());
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    inc[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].i)].push_back(e);
    inc[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].j)].push_back(e);
  }
  return inc;
}

void Network::validate() const {
  const int n = node_count();
  for (const Node& node : nodes) {
    const double s = domain_side;
    const double slack = 1e-12 * s;
    if (node.position.x() < -slack || node.position.x() > s + slack ||
        node.position.y() < -slack || node.position.y() > s + slack)
      throw numerical_error("node position outside the domain square");
  }
  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const Edge& ed = edges[static_cast<std::size_t>(e)];
    if (ed.i < 0 || ed.i >= n || ed.j < 0 || ed.j >= n || ed.i == ed.j)
      throw numerical_error("edge " + std::to_string(e) + " has invalid endpoints");
    if (!(edge_length(e) > 0.0))
      throw numerical_error("edge " + std::to_string(e) + " has zero length");
    auto key = std::minmax(ed.i, ed.j);
    if (!seen.insert(key).second)
      throw numerical_error("duplicate edge between nodes " + std::to_string(key.first) +
                            " and " + std::to_string(key.second));
  }
  const int ne = static_cast<int>(edges.size());
  for (const EdgePair& p : pairs) {
    if (p.e1 < 0 || p.e1 >= ne || p.e2 < 0 || p.e2 >= ne || p.e1 == p.e2)
      throw numerical_error("edge pair references invalid edges");
    const Edge& a = edges[static_cast<std::size_t>(p.e1)];
    const Edge& b = edges[static_cast<std::size_t>(p.e2)];
    if ((a.i != p.center && a.j != p.center) || (b.i != p.center && b.j != p.center))
      throw numerical_error("edge pair center is not shared by both edges");
  }
}

std::string scheme_name(const CoefficientScheme& scheme) {
  if (std::holds_alternative<HomogeneousScheme>(scheme)) return "homogeneous";
  if (std::holds_alternative<RandomUniformScheme>(scheme)) return "random";
  return "fiber";
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0))
    throw config_error(std::string("coefficient '") + name + "' must be positive");
}

void require_range(const ValueRange& r, const char* name) {
  if (!(r.lo > 0.0) || !(r.lo <= r.hi))
    throw config_error(std::string("range for '") + name +
                       "' must satisfy 0 < low <= high");
}

// volume ranges may be left unset (0,0) to request the derived default.
void require_volume_range(const ValueRange& r) {
  if (r.lo == 0.0 && r.hi == 0.0) return;
  require_range(r, "volume");
}

void check_set(const CoefficientSet& c, bool allow_derived_volume) {
  require_positive(c.k, "k");
  require_positive(c.a, "a");
  require_positive(c.w, "w");
  require_positive(c.kappa, "kappa");
  if (!allow_derived_volume || c.volume != 0.0) require_positive(c.volume, "volume");
  if (c.eta < 0.0) throw config_error("coefficient 'eta' must be non-negative");
  if (c.gamma < 0.0) throw config_error("coefficient 'gamma' must be non-negative");
}

double derived_volume(const Network& net, const EdgePair& p, double thickness) {
  return net.edges[static_cast<std::size_t>(p.e1)].w *
         net.edges[static_cast<std::size_t>(p.e2)].w * thickness;
}

void apply_homogeneous(Network& net, const HomogeneousScheme& s) {
  check_set(s.values, true);
  if (s.values.volume == 0.0) require_positive(s.thickness, "thickness");
  for (Edge& e : net.edges) {
    e.k = s.values.k;
    e.a = s.values.a;
    e.w = s.values.w;
  }
  for (EdgePair& p : net.pairs) {
    p.kappa = s.values.kappa;
    p.volume = s.values.volume > 0.0 ? s.values.volume
                                     : derived_volume(net, p, s.thickness);
    p.eta = s.values.eta;
    p.gamma = s.values.gamma;
  }
}

void apply_random(Network& net, const RandomUniformScheme& s, Rng& rng) {
  require_range(s.k, "k");
  require_range(s.a, "a");
  require_range(s.w, "w");
  require_range(s.kappa, "kappa");
  require_volume_range(s.volume);
  require_range(s.eta, "eta");
  require_range(s.gamma, "gamma");
  const bool derived = s.volume.lo == 0.0 && s.volume.hi == 0.0;
  if (derived) require_positive(s.thickness, "thickness");
  // Draw order is part of the format: edges first, then pairs, each
  // coefficient in declaration order.
  for (Edge& e : net.edges) {
    e.k = rng.uniform(s.k.lo, s.k.hi);
    e.a = rng.uniform(s.a.lo, s.a.hi);
    e.w = rng.uniform(s.w.lo, s.w.hi);
  }
  for (EdgePair& p : net.pairs) {
    p.kappa = rng.uniform(s.kappa.lo, s.kappa.hi);
    p.volume = derived ? derived_volume(net, p, s.thickness)
                       : rng.uniform(s.volume.lo, s.volume.hi);
    p.eta = rng.uniform(s.eta.lo, s.eta.hi);
    p.gamma = rng.uniform(s.gamma.lo, s.gamma.hi);
  }
}

void apply_fiber(Network& net, const FiberScheme& s, Rng& rng) {
  check_set(s.intra, true);
  check_set(s.bond, true);
  if (s.intra.volume == 0.0 || s.bond.volume == 0.0)
    require_positive(s.thickness, "thickness");
  if (!(s.factor.lo > 0.0) || !(s.factor.lo <= s.factor.hi))
    throw config_error("fiber factor range must satisfy 0 < low <= high");
  const bool randomized = !s.factor.fixed();
  for (Edge& e : net.edges) {
    const double f = randomized ? rng.uniform(s.factor.lo, s.factor.hi) : 1.0;
    e.k = s.intra.k * f;
    e.a = s.intra.a;
    e.w = s.intra.w;
  }
  for (EdgePair& p : net.pairs) {
    const CoefficientSet& c = p.kind == PairKind::intra_fiber ? s.intra : s.bond;
    const double f = randomized ? rng.uniform(s.factor.lo, s.factor.hi) : 1.0;
    p.kappa = c.kappa * f;
    p.volume = c.volume > 0.0 ? c.volume : derived_volume(net, p, s.thickness);
    p.eta = c.eta;
    p.gamma = c.gamma;
  }
}

} // namespace

void assign_coefficients(Network& network, const CoefficientScheme& scheme,
                         std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x9c0effcf));
  if (const auto* h = std::get_if<HomogeneousScheme>(&scheme)) {
    apply_homogeneous(network, *h);
  } else if (const auto* r = std::get_if<RandomUniformScheme>(&scheme)) {
    apply_random(network, *r, rng);
  } else {
    apply_fiber(network, std::get<FiberScheme>(scheme), rng);
  }
  network.scheme = scheme_name(scheme);
}

} // namespace fibernet
