#include "fibernet/generators.hpp"

#include "fibernet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

namespace fibernet {

PairRule pair_rule_from_name(const std::string& name) {
  if (name == "all") return PairRule::all;
  if (name == "collinear") return PairRule::collinear;
  if (name == "perpendicular") return PairRule::perpendicular;
  throw config_error("unknown pair rule: " + name);
}

std::string pair_rule_name(PairRule rule) {
  switch (rule) {
    case PairRule::all: return "all";
    case PairRule::collinear: return "collinear";
    case PairRule::perpendicular: return "perpendicular";
  }
  return "all";
}

namespace {

// Grid edges alternate: axis 0 = horizontal, 1 = vertical. Pair filtering
// on grids uses the index-space axis, not the (possibly perturbed) geometry.
struct GridEdgeInfo {
  int axis = 0;
};

void add_grid_pairs(Network& net, const std::vector<GridEdgeInfo>& info,
                    PairRule rule) {
  const auto inc = net.incidence();
  for (int node = 0; node < net.node_count(); ++node) {
    const auto& edges = inc[static_cast<std::size_t>(node)];
    for (std::size_t x = 0; x < edges.size(); ++x) {
      for (std::size_t y = x + 1; y < edges.size(); ++y) {
        const int e1 = edges[x];
        const int e2 = edges[y];
        const bool same_axis = info[static_cast<std::size_t>(e1)].axis ==
                               info[static_cast<std::size_t>(e2)].axis;
        if (rule == PairRule::collinear && !same_axis) continue;
        if (rule == PairRule::perpendicular && same_axis) continue;
        EdgePair pair;
        pair.e1 = e1;
        pair.e2 = e2;
        pair.center = node;
        pair.kind = PairKind::intra_fiber;
        net.pairs.push_back(pair);
      }
    }
  }
}

Network make_grid(int m_fine, double domain_side, PairRule rule) {
  if (m_fine < 2) throw config_error("m_fine must be at least 2");
  if (!(domain_side > 0.0)) throw config_error("domain_side must be positive");
  Network net;
  net.domain_side = domain_side;
  net.generator = "structured";
  const int n1 = m_fine + 1;
  const double h = domain_side / m_fine;
  net.nodes.reserve(static_cast<std::size_t>(n1) * n1);
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n1; ++i) {
      Node node;
      const double x = i == m_fine ? domain_side : i * h;
      const double y = j == m_fine ? domain_side : j * h;
      node.position = Vec2(x, y);
      std::uint8_t mask = 0;
      if (i == 0) mask |= side::left;
      if (i == m_fine) mask |= side::right;
      if (j == 0) mask |= side::bottom;
      if (j == m_fine) mask |= side::top;
      node.sides = mask;
      net.nodes.push_back(node);
    }
  }
  std::vector<GridEdgeInfo> info;
  for (int j = 0; j < n1; ++j) {
    for (int i = 0; i < n1; ++i) {
      const int nid = j * n1 + i;
      if (i < m_fine) {
        net.edges.push_back(Edge{nid, nid + 1, 0, 0, 0, -1});
        info.push_back(GridEdgeInfo{0});
      }
      if (j < m_fine) {
        net.edges.push_back(Edge{nid, nid + n1, 0, 0, 0, -1});
        info.push_back(GridEdgeInfo{1});
      }
    }
  }
  add_grid_pairs(net, info, rule);
  return net;
}

} // namespace

Network generate_structured(int m_fine, double domain_side, PairRule rule) {
  Network net = make_grid(m_fine, domain_side, rule);
  net.validate();
  return net;
}

Network generate_perturbed(int m_fine, double domain_side, double magnitude,
                           std::uint64_t seed, PairRule rule) {
  if (magnitude < 0.0 || magnitude >= 0.5)
    throw config_error("perturbation magnitude must lie in [0, 0.5)");
  Network net = make_grid(m_fine, domain_side, rule);
  net.generator = "perturbed";
  net.seed = seed;
  const double h = domain_side / m_fine;
  const double amp = magnitude * h;
  Rng rng(Rng::derive(seed, 0x7e27b1));
  for (Node& node : net.nodes) {
    const std::uint8_t mask = node.sides;
    const bool on_lr = mask & (side::left | side::right);
    const bool on_bt = mask & (side::bottom | side::top);
    if (on_lr && on_bt) continue; // corners fixed
    if (on_lr) {
      node.position.y() += rng.uniform(-amp, amp);
    } else if (on_bt) {
      node.position.x() += rng.uniform(-amp, amp);
    } else {
      node.position.x() += rng.uniform(-amp, amp);
      node.position.y() += rng.uniform(-amp, amp);
    }
  }
  net.validate();
  return net;
}

// ---------------------------------------------------------------------------
// Fiber networks
// ---------------------------------------------------------------------------

namespace {

using Segment = FiberSegment;

// Liang-Barsky clip of p0..p1 against [0,s]^2. Returns false if nothing
// remains inside.
bool clip_to_square(Vec2& p0, Vec2& p1, double s) {
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = p1 - p0;
  const double checks[4][2] = {{-d.x(), p0.x() - 0.0},
                               {d.x(), s - p0.x()},
                               {-d.y(), p0.y() - 0.0},
                               {d.y(), s - p0.y()}};
  for (const auto& c : checks) {
    const double p = c[0], q = c[1];
    if (p == 0.0) {
      if (q < 0.0) return false;
      continue;
    }
    const double r = q / p;
    if (p < 0.0) {
      if (r > t1) return false;
      t0 = std::max(t0, r);
    } else {
      if (r < t0) return false;
      t1 = std::min(t1, r);
    }
  }
  const Vec2 base = p0;
  p0 = base + t0 * d;
  p1 = base + t1 * d;
  p0 = p0.cwiseMax(0.0).cwiseMin(s);
  p1 = p1.cwiseMax(0.0).cwiseMin(s);
  return (p1 - p0).norm() > 0.0;
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper intersection of two segments; near-parallel pairs are treated as
// non-crossing.
bool segment_intersection(const Segment& f, const Segment& g, double& tf,
                          double& tg) {
  const Vec2 r = f.p1 - f.p0;
  const Vec2 q = g.p1 - g.p0;
  const double denom = cross2(r, q);
  if (std::abs(denom) <= 1e-12 * r.norm() * q.norm()) return false;
  const Vec2 w = g.p0 - f.p0;
  tf = cross2(w, q) / denom;
  tg = cross2(w, r) / denom;
  return tf >= 0.0 && tf <= 1.0 && tg >= 0.0 && tg <= 1.0;
}

// Snapping node registry on a uniform hash grid of cell size eps.
class NodeRegistry {
public:
  NodeRegistry(double eps) : eps_(eps) {}

  int get_or_create(std::vector<Node>& nodes, const Vec2& p) {
    const long cx = static_cast<long>(std::floor(p.x() / eps_));
    const long cy = static_cast<long>(std::floor(p.y() / eps_));
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (int id : it->second) {
          if ((nodes[static_cast<std::size_t>(id)].position - p).norm() <= eps_)
            return id;
        }
      }
    }
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(Node{p, 0});
    cells_[key(cx, cy)].push_back(id);
    return id;
  }

private:
  static std::uint64_t key(long x, long y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
  }
  double eps_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

struct Cut {
  double t;
  int node;
};

} // namespace

Network build_fiber_network(double domain_side,
                            const std::vector<FiberSegment>& fibers,
                            int segments_per_fiber, int max_bond_pairs,
                            double merge_radius, std::uint64_t seed) {
  const double eps = std::max(kGeomEps * domain_side, merge_radius);
  Network net;
  net.domain_side = domain_side;
  net.generator = "fiber";
  net.seed = seed;

  NodeRegistry registry(eps);
  const int nf = static_cast<int>(fibers.size());
  std::vector<std::vector<Cut>> cuts(static_cast<std::size_t>(nf));

  for (int f = 0; f < nf; ++f) {
    const Segment& seg = fibers[static_cast<std::size_t>(f)];
    auto& list = cuts[static_cast<std::size_t>(f)];
    list.push_back({0.0, registry.get_or_create(net.nodes, seg.p0)});
    for (int k = 1; k < segments_per_fiber; ++k) {
      const double t = static_cast<double>(k) / segments_per_fiber;
      const Vec2 p = seg.p0 + t * (seg.p1 - seg.p0);
      list.push_back({t, registry.get_or_create(net.nodes, p)});
    }
    list.push_back({1.0, registry.get_or_create(net.nodes, seg.p1)});
  }

  for (int f = 0; f < nf; ++f) {
    for (int g = f + 1; g < nf; ++g) {
      double tf, tg;
      if (!segment_intersection(fibers[static_cast<std::size_t>(f)],
                                fibers[static_cast<std::size_t>(g)], tf, tg))
        continue;
      const Segment& sf = fibers[static_cast<std::size_t>(f)];
      const Vec2 p = sf.p0 + tf * (sf.p1 - sf.p0);
      const int node = registry.get_or_create(net.nodes, p);
      cuts[static_cast<std::size_t>(f)].push_back({tf, node});
      cuts[static_cast<std::size_t>(g)].push_back({tg, node});
    }
  }

  // Joint fusion can make two fibers share an edge; the chain then reuses
  // the edge id so consecutive entries still share a node.
  std::map<std::pair<int, int>, int> edge_ids;
  std::vector<std::vector<int>> fiber_edges(static_cast<std::size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    auto& list = cuts[static_cast<std::size_t>(f)];
    std::stable_sort(list.begin(), list.end(),
                     [](const Cut& a, const Cut& b) { return a.t < b.t; });
    int prev = -1;
    auto& fe = fiber_edges[static_cast<std::size_t>(f)];
    for (const Cut& c : list) {
      if (c.node == prev) continue;
      if (prev >= 0) {
        const auto key = std::minmax(prev, c.node);
        auto [it, inserted] = edge_ids.try_emplace(key, static_cast<int>(net.edges.size()));
        if (inserted) net.edges.push_back(Edge{prev, c.node, 0, 0, 0, f});
        if (fe.empty() || fe.back() != it->second) fe.push_back(it->second);
      }
      prev = c.node;
    }
  }

  // Intra-fiber pairs join consecutive segments of one fiber.
  for (int f = 0; f < nf; ++f) {
    const auto& fe = fiber_edges[static_cast<std::size_t>(f)];
    for (std::size_t x = 0; x + 1 < fe.size(); ++x) {
      const Edge& a = net.edges[static_cast<std::size_t>(fe[x])];
      const Edge& b = net.edges[static_cast<std::size_t>(fe[x + 1])];
      const int center = a.j == b.i || a.j == b.j ? a.j : a.i;
      net.pairs.push_back(
          EdgePair{fe[x], fe[x + 1], center, 0, 0, 0, 0, PairKind::intra_fiber});
    }
  }

  // Bond pairs: at each node, every edge of fiber A against every edge of
  // fiber B, capped per crossing fiber pair.
  const auto inc = net.incidence();
  for (int node = 0; node < net.node_count(); ++node) {
    const auto& edges = inc[static_cast<std::size_t>(node)];
    std::map<int, std::vector<int>> by_fiber;
    for (int e : edges)
      by_fiber[net.edges[static_cast<std::size_t>(e)].fiber].push_back(e);
    if (by_fiber.size() < 2) continue;
    for (auto ia = by_fiber.begin(); ia != by_fiber.end(); ++ia) {
      for (auto ib = std::next(ia); ib != by_fiber.end(); ++ib) {
        int made = 0;
        for (int ea : ia->second) {
          for (int eb : ib->second) {
            if (made >= max_bond_pairs) break;
            net.pairs.push_back(
                EdgePair{ea, eb, node, 0, 0, 0, 0, PairKind::inter_fiber_bond});
            ++made;
          }
          if (made >= max_bond_pairs) break;
        }
      }
    }
  }

  for (Node& node : net.nodes)
    node.sides = classify_sides(node.position, domain_side, kBoundaryEps);
  return net;
}

namespace {

std::vector<Segment> draw_fibers(int count, double domain_side,
                                 double fiber_length, Rng& rng) {
  std::vector<Segment> fibers;
  fibers.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(fibers.size()) < count) {
    const Vec2 mid(rng.uniform(0.0, domain_side), rng.uniform(0.0, domain_side));
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const Vec2 half = 0.5 * fiber_length * Vec2(std::cos(theta), std::sin(theta));
    Segment seg{mid - half, mid + half};
    if (!clip_to_square(seg.p0, seg.p1, domain_side)) continue;
    if ((seg.p1 - seg.p0).norm() < 1e-6 * domain_side) continue;
    fibers.push_back(seg);
  }
  return fibers;
}

void check_boundary_coverage(const Network& net) {
  std::uint8_t seen = 0;
  for (const Node& n : net.nodes) seen |= n.sides;
  const std::uint8_t all = side::left | side::right | side::bottom | side::top;
  if (seen != all)
    throw config_error(
        "fiber network does not touch all four boundary sides after pruning; "
        "increase fiber count or fiber length");
}

} // namespace

Network generate_fiber_network(double domain_side, const FiberParams& params,
                               std::uint64_t seed) {
  if (!(domain_side > 0.0)) throw config_error("domain_side must be positive");
  const double fiber_length =
      params.fiber_length > 0.0 ? params.fiber_length : 0.4 * domain_side;
  if (fiber_length >= domain_side)
    throw config_error("fiber_length must lie in (0, domain_side)");
  if (params.segments_per_fiber < 1)
    throw config_error("segments_per_fiber must be at least 1");
  if (params.max_bond_pairs < 1)
    throw config_error("max_bond_pairs must be at least 1");
  const double merge_radius =
      params.merge_radius > 0.0 ? params.merge_radius : 1e-3 * domain_side;
  if (merge_radius >= fiber_length)
    throw config_error("merge_radius must be smaller than the fiber length");

  // With target_nodes set, the fiber count is adjusted over a shared fiber
  // stream: attempt N uses the first N fibers, so grown attempts extend
  // earlier ones deterministically.
  const bool targeting = params.target_nodes > 0;
  int count = params.fiber_count;
  if (targeting && count <= 0) count = 64;
  if (!targeting && count < 2) throw config_error("fiber_count must be at least 2");
  count = std::max(count, 2);

  Rng rng(Rng::derive(seed, 0xf1be125));
  std::vector<Segment> stream = draw_fibers(count, domain_side,
                                            fiber_length, rng);

  auto attempt = [&](int n) {
    while (static_cast<int>(stream.size()) < n) {
      auto more = draw_fibers(n - static_cast<int>(stream.size()), domain_side,
                              fiber_length, rng);
      stream.insert(stream.end(), more.begin(), more.end());
    }
    std::vector<Segment> take(stream.begin(), stream.begin() + n);
    Network net = build_fiber_network(domain_side, take,
                                      params.segments_per_fiber,
                                      params.max_bond_pairs, merge_radius, seed);
    prune(net);
    return net;
  };

  Network net = attempt(count);
  if (targeting) {
    for (int iter = 0; iter < 6; ++iter) {
      const int got = net.node_count();
      if (std::abs(got - params.target_nodes) <=
          std::max(1, params.target_nodes / 10))
        break;
      // nodes ~ A*N + B*N^2 (endpoints/joints + crossings)
      const double A = static_cast<double>(params.segments_per_fiber + 1);
      const double B = std::max(
          (static_cast<double>(got) - A * count) / (static_cast<double>(count) * count),
          1e-12);
      const double target = static_cast<double>(params.target_nodes);
      int next = static_cast<int>(
          std::lround((-A + std::sqrt(A * A + 4.0 * B * target)) / (2.0 * B)));
      next = std::max(next, 2);
      if (next == count) break;
      count = next;
      net = attempt(count);
    }
  }

  check_boundary_coverage(net);
  net.validate();
  return net;
}

// ---------------------------------------------------------------------------
// Pruning
// ---------------------------------------------------------------------------

PruneReport prune(Network& net) {
  PruneReport report;
  const int n = net.node_count();
  const int ne = static_cast<int>(net.edges.size());

  std::vector<char> node_alive(static_cast<std::size_t>(n), 1);
  std::vector<char> edge_alive(static_cast<std::size_t>(ne), 1);
  std::vector<char> pair_alive(net.pairs.size(), 1);

  // Largest connected component over the edge graph.
  {
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    const auto inc = net.incidence();
    int ncomp = 0;
    std::vector<int> comp_size;
    for (int start = 0; start < n; ++start) {
      if (comp[static_cast<std::size_t>(start)] >= 0) continue;
      const int c = ncomp++;
      comp_size.push_back(0);
      std::deque<int> queue{start};
      comp[static_cast<std::size_t>(start)] = c;
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        ++comp_size[static_cast<std::size_t>(c)];
        for (int e : inc[static_cast<std::size_t>(v)]) {
          const int o = net.opposite_node(e, v);
          if (comp[static_cast<std::size_t>(o)] < 0) {
            comp[static_cast<std::size_t>(o)] = c;
            queue.push_back(o);
          }
        }
      }
    }
    // BFS seeds run in node order, so the first maximal component also has
    // the smallest minimum node id.
    int best = 0;
    for (int c = 1; c < ncomp; ++c)
      if (comp_size[static_cast<std::size_t>(c)] > comp_size[static_cast<std::size_t>(best)])
        best = c;
    report.removed_components = ncomp - 1;
    for (int v = 0; v < n; ++v)
      if (comp[static_cast<std::size_t>(v)] != best) node_alive[static_cast<std::size_t>(v)] = 0;
    for (int e = 0; e < ne; ++e) {
      const Edge& ed = net.edges[static_cast<std::size_t>(e)];
      if (!node_alive[static_cast<std::size_t>(ed.i)] ||
          !node_alive[static_cast<std::size_t>(ed.j)])
        edge_alive[static_cast<std::size_t>(e)] = 0;
    }
  }

  // Dangling-chain removal: a degree-1 node whose edge appears in no live
  // pair is a zero-stiffness mechanism.
  {
    std::vector<std::vector<int>> pairs_of_edge(static_cast<std::size_t>(ne));
    for (int p = 0; p < static_cast<int>(net.pairs.size()); ++p) {
      const EdgePair& ep = net.pairs[static_cast<std::size_t>(p)];
      if (!edge_alive[static_cast<std::size_t>(ep.e1)] ||
          !edge_alive[static_cast<std::size_t>(ep.e2)]) {
        pair_alive[static_cast<std::size_t>(p)] = 0;
        continue;
      }
      pairs_of_edge[static_cast<std::size_t>(ep.e1)].push_back(p);
      pairs_of_edge[static_cast<std::size_t>(ep.e2)].push_back(p);
    }
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    std::vector<int> live_pairs(static_cast<std::size_t>(ne), 0);
    const auto inc = net.incidence();
    for (int e = 0; e < ne; ++e) {
      if (!edge_alive[static_cast<std::size_t>(e)]) continue;
      ++degree[static_cast<std::size_t>(net.edges[static_cast<std::size_t>(e)].i)];
      ++degree[static_cast<std::size_t>(net.edges[static_cast<std::size_t>(e)].j)];
      live_pairs[static_cast<std::size_t>(e)] =
          static_cast<int>(std::count_if(
              pairs_of_edge[static_cast<std::size_t>(e)].begin(),
              pairs_of_edge[static_cast<std::size_t>(e)].end(), [&](int p) {
                return pair_alive[static_cast<std::size_t>(p)] != 0;
              }));
    }
    std::deque<int> queue;
    for (int v = 0; v < n; ++v)
      if (node_alive[static_cast<std::size_t>(v)] && degree[static_cast<std::size_t>(v)] == 1)
        queue.push_back(v);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      if (!node_alive[static_cast<std::size_t>(v)] || degree[static_cast<std::size_t>(v)] != 1)
        continue;
      int term = -1;
      for (int e : inc[static_cast<std::size_t>(v)])
        if (edge_alive[static_cast<std::size_t>(e)]) term = e;
      if (term < 0 || live_pairs[static_cast<std::size_t>(term)] > 0) continue;
      // remove v and its edge
      node_alive[static_cast<std::size_t>(v)] = 0;
      edge_alive[static_cast<std::size_t>(term)] = 0;
      ++report.removed_chain_nodes;
      const int other = net.opposite_node(term, v);
      --degree[static_cast<std::size_t>(v)];
      --degree[static_cast<std::size_t>(other)];
      for (int p : pairs_of_edge[static_cast<std::size_t>(term)]) {
        if (!pair_alive[static_cast<std::size_t>(p)]) continue;
        pair_alive[static_cast<std::size_t>(p)] = 0;
        const EdgePair& ep = net.pairs[static_cast<std::size_t>(p)];
        const int mate = ep.e1 == term ? ep.e2 : ep.e1;
        if (edge_alive[static_cast<std::size_t>(mate)] &&
            --live_pairs[static_cast<std::size_t>(mate)] == 0) {
          const Edge& med = net.edges[static_cast<std::size_t>(mate)];
          if (degree[static_cast<std::size_t>(med.i)] == 1) queue.push_back(med.i);
          if (degree[static_cast<std::size_t>(med.j)] == 1) queue.push_back(med.j);
        }
      }
      if (degree[static_cast<std::size_t>(other)] == 1) queue.push_back(other);
      if (degree[static_cast<std::size_t>(other)] == 0)
        node_alive[static_cast<std::size_t>(other)] = 0;
    }
  }

  // Compact ids, preserving order.
  std::vector<int> node_map(static_cast<std::size_t>(n), -1);
  {
    std::vector<Node> nodes;
    for (int v = 0; v < n; ++v) {
      if (!node_alive[static_cast<std::size_t>(v)]) continue;
      node_map[static_cast<std::size_t>(v)] = static_cast<int>(nodes.size());
      nodes.push_back(net.nodes[static_cast<std::size_t>(v)]);
    }
    report.removed_nodes = n - static_cast<int>(nodes.size());
    net.nodes = std::move(nodes);
  }
  std::vector<int> edge_map(static_cast<std::size_t>(ne), -1);
  {
    std::vector<Edge> edges;
    for (int e = 0; e < ne; ++e) {
      if (!edge_alive[static_cast<std::size_t>(e)]) continue;
      Edge ed = net.edges[static_cast<std::size_t>(e)];
      ed.i = node_map[static_cast<std::size_t>(ed.i)];
      ed.j = node_map[static_cast<std::size_t>(ed.j)];
      edge_map[static_cast<std::size_t>(e)] = static_cast<int>(edges.size());
      edges.push_back(ed);
    }
    report.removed_edges = ne - static_cast<int>(edges.size());
    net.edges = std::move(edges);
  }
  {
    std::vector<EdgePair> pairs;
    for (std::size_t p = 0; p < net.pairs.size(); ++p) {
      if (!pair_alive[p]) continue;
      EdgePair ep = net.pairs[p];
      ep.e1 = edge_map[static_cast<std::size_t>(ep.e1)];
      ep.e2 = edge_map[static_cast<std::size_t>(ep.e2)];
      ep.center = node_map[static_cast<std::size_t>(ep.center)];
      pairs.push_back(ep);
    }
    report.removed_pairs = static_cast<int>(net.pairs.size() - pairs.size());
    net.pairs = std::move(pairs);
  }

  if (net.nodes.empty() || net.edges.empty())
    throw numerical_error("pruning removed the entire network");
  return report;
}

} // namespace fibernet
