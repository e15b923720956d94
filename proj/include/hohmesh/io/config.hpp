#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include "hohmesh/core.hpp"

namespace hohmesh::io {

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// `name = value` lines; '#' starts a comment. Later keys override earlier ones.
inline KeyValues parse_key_values(std::string_view text, const std::string& origin = "<string>") {
  KeyValues kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    HOHMESH_REQUIRE(eq != std::string_view::npos, ErrorKind::ConfigError,
                    origin + ":" + std::to_string(line_no) + ": expected 'name = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    HOHMESH_REQUIRE(!key.empty(), ErrorKind::ConfigError, origin + ":" + std::to_string(line_no) + ": empty name");
    kv[std::string(key)] = std::string(value);
  }
  return kv;
}

inline KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  HOHMESH_REQUIRE(in.good(), ErrorKind::IoError, "cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_key_values(text, path.string());
}

inline double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  HOHMESH_REQUIRE(ec == std::errc{} && ptr == end, ErrorKind::ConfigError,
                  "invalid number for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

}  // namespace hohmesh::io
