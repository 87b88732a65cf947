#include "fibernet/export.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fibernet {

std::string format_full(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_coo(const SparseMat& matrix, std::ostream& out) {
  SparseMatRM by_row(matrix); // conversion sorts entries row-major
  by_row.makeCompressed();
  for (int row = 0; row < by_row.outerSize(); ++row)
    for (SparseMatRM::InnerIterator it(by_row, row); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << format_full(it.value())
          << '\n';
}

void write_coo_file(const SparseMat& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  write_coo(matrix, out);
  if (!out) throw io_error("write failed: " + path);
}

std::vector<Triplet> read_coo(std::istream& in) {
  std::vector<Triplet> triplets;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    int row = 0, col = 0;
    double value = 0.0;
    if (!(fields >> row >> col >> value) || row < 0 || col < 0)
      throw io_error("coordinate file: malformed line " +
                     std::to_string(line_no));
    triplets.emplace_back(row, col, value);
  }
  return triplets;
}

std::string system_to_json(const StiffnessSystem& system) {
  nlohmann::json root;
  root["format_version"] = kSystemFormatVersion;
  root["dof_count"] = system.dof_count();
  root["F"] = std::vector<double>(system.F.data(),
                                  system.F.data() + system.F.size());
  nlohmann::json constrained = nlohmann::json::array();
  for (const auto& [dof, value] : system.constrained)
    constrained.push_back({{"dof", dof}, {"value", value}});
  root["constrained"] = std::move(constrained);
  return root.dump(1);
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw io_error("write failed: " + path);
}

} // namespace fibernet
