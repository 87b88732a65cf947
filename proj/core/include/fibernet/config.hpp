#pragma once

#include "fibernet/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fibernet {

/// Flat key-value configuration with INI-style sections. Keys are
/// "section.key"; later assignments win, so CLI overrides are plain set()
/// calls.
class Config {
public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback) const;

  /// Sorted "key=value" lines; the canonical form feeds the config hash.
  std::string canonical() const;
  /// FNV-1a of the canonical form.
  std::uint64_t hash() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

double parse_double(const std::string& text, const std::string& what);
int parse_int(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);

} // namespace fibernet
