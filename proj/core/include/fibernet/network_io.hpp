#pragma once

#include "fibernet/network.hpp"

#include <string>

namespace fibernet {

/// Versioned JSON: header {format_version, domain_side, seed, generator,
/// scheme} plus nodes / edges / pairs arrays. Doubles round-trip exactly.
std::string network_to_json(const Network& network);
Network network_from_json(const std::string& text);

void write_network(const Network& network, const std::string& path);
Network read_network(const std::string& path);

} // namespace fibernet
