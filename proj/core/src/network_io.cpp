#include "fibernet/network_io.hpp"

#include <fstream>
#include <json.hpp>

namespace fibernet {

using nlohmann::json;

namespace {

json node_to_json(const Node& node, int id) {
  return json{{"id", id},
              {"x", node.position.x()},
              {"y", node.position.y()},
              {"tag", boundary_tag(node.sides)}};
}

json edge_to_json(const Edge& edge, int id) {
  return json{{"id", id}, {"i", edge.i}, {"j", edge.j}, {"k", edge.k},
              {"a", edge.a}, {"w", edge.w}, {"fiber", edge.fiber}};
}

json pair_to_json(const EdgePair& pair, int id) {
  return json{{"id", id},
              {"e1", pair.e1},
              {"e2", pair.e2},
              {"center", pair.center},
              {"kappa", pair.kappa},
              {"V", pair.volume},
              {"eta", pair.eta},
              {"gamma", pair.gamma},
              {"kind", pair_kind_name(pair.kind)}};
}

const json& field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw io_error("network file: missing field '" + std::string(key) +
                   "' in " + where);
  return *it;
}

} // namespace

std::string network_to_json(const Network& network) {
  json root;
  root["format_version"] = kNetworkFormatVersion;
  root["domain_side"] = network.domain_side;
  root["seed"] = network.seed;
  root["generator"] = network.generator;
  root["scheme"] = network.scheme;

  json nodes = json::array();
  for (int i = 0; i < network.node_count(); ++i)
    nodes.push_back(node_to_json(network.nodes[i], i));
  root["nodes"] = std::move(nodes);

  json edges = json::array();
  for (int e = 0; e < static_cast<int>(network.edges.size()); ++e)
    edges.push_back(edge_to_json(network.edges[e], e));
  root["edges"] = std::move(edges);

  json pairs = json::array();
  for (int p = 0; p < static_cast<int>(network.pairs.size()); ++p)
    pairs.push_back(pair_to_json(network.pairs[p], p));
  root["pairs"] = std::move(pairs);

  return root.dump(1);
}

Network network_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw io_error(std::string("network file: not valid JSON: ") + e.what());
  }
  try {
    const int version = field(root, "format_version", "header").get<int>();
    if (version != kNetworkFormatVersion)
      throw io_error("network file: unsupported format_version " +
                     std::to_string(version));

    Network net;
    net.domain_side = field(root, "domain_side", "header").get<double>();
    net.seed = field(root, "seed", "header").get<std::uint64_t>();
    net.generator = field(root, "generator", "header").get<std::string>();
    net.scheme = field(root, "scheme", "header").get<std::string>();

    for (const json& item : field(root, "nodes", "header")) {
      Node node;
      node.position =
          Vec2(field(item, "x", "node").get<double>(),
               field(item, "y", "node").get<double>());
      node.sides = classify_sides(node.position, net.domain_side);
      const std::string tag = field(item, "tag", "node").get<std::string>();
      if (boundary_tag(node.sides) != tag)
        throw io_error("network file: node " +
                       std::to_string(net.nodes.size()) + " tag '" + tag +
                       "' does not match its position");
      if (field(item, "id", "node").get<int>() !=
          static_cast<int>(net.nodes.size()))
        throw io_error("network file: node ids must be dense and ordered");
      net.nodes.push_back(node);
    }

    for (const json& item : field(root, "edges", "header")) {
      Edge edge;
      edge.i = field(item, "i", "edge").get<int>();
      edge.j = field(item, "j", "edge").get<int>();
      edge.k = field(item, "k", "edge").get<double>();
      edge.a = field(item, "a", "edge").get<double>();
      edge.w = field(item, "w", "edge").get<double>();
      edge.fiber = field(item, "fiber", "edge").get<int>();
      if (field(item, "id", "edge").get<int>() !=
          static_cast<int>(net.edges.size()))
        throw io_error("network file: edge ids must be dense and ordered");
      net.edges.push_back(edge);
    }

    for (const json& item : field(root, "pairs", "header")) {
      EdgePair pair;
      pair.e1 = field(item, "e1", "pair").get<int>();
      pair.e2 = field(item, "e2", "pair").get<int>();
      pair.center = field(item, "center", "pair").get<int>();
      pair.kappa = field(item, "kappa", "pair").get<double>();
      pair.volume = field(item, "V", "pair").get<double>();
      pair.eta = field(item, "eta", "pair").get<double>();
      pair.gamma = field(item, "gamma", "pair").get<double>();
      pair.kind =
          pair_kind_from_name(field(item, "kind", "pair").get<std::string>());
      if (field(item, "id", "pair").get<int>() !=
          static_cast<int>(net.pairs.size()))
        throw io_error("network file: pair ids must be dense and ordered");
      net.pairs.push_back(pair);
    }

    net.validate();
    return net;
  } catch (const json::exception& e) {
    throw io_error(std::string("network file: malformed field: ") + e.what());
  }
}

void write_network(const Network& network, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << network_to_json(network) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

Network read_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open network file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return network_from_json(text);
}

} // namespace fibernet
