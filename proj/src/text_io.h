#pragma once

// Line-oriented text parsing helpers shared by the file loaders.

#include <charconv>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "linklouvain/errors.h"
#include "linklouvain/graph.h"

namespace linklouvain::detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

inline bool parse_int(std::string_view s, ExternalId& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

inline ExternalId require_int(const std::string& path, std::size_t line, std::string_view field,
                       const char* what) {
  ExternalId id = 0;
  if (!parse_int(field, id)) {
    // from_chars reports out-of-range separately, but both mean the id is not
    // representable as a 64-bit integer.
    throw ParseError(path, line, std::string("invalid ") + what + " '" +
                                     std::string(field) + "'");
  }
  return id;
}

}  // namespace linklouvain::detail
