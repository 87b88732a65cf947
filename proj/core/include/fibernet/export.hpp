#pragma once

#include "fibernet/assembly.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fibernet {

/// "row col value" per stored entry, 0-based, sorted row-major, values at
/// full precision (format_full).
void write_coo(const SparseMat& matrix, std::ostream& out);
void write_coo_file(const SparseMat& matrix, const std::string& path);

/// Parses the coordinate text format back into triplets (round-trip checks
/// and external data).
std::vector<Triplet> read_coo(std::istream& in);

/// Load vector and constraint map in the same versioned JSON container style
/// as the network file; the matrix itself travels in the coordinate format.
std::string system_to_json(const StiffnessSystem& system);

void write_text_file(const std::string& text, const std::string& path);

} // namespace fibernet
