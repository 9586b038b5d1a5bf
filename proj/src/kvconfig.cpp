// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#include "gunpose/kvconfig.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "gunpose/error.hpp"

namespace gunpose {

namespace {
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}
}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t sep = line.find_first_of("=:");
    if (sep == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    KeyValue kv{std::string(trim(line.substr(0, sep))), std::string(trim(line.substr(sep + 1))), line_no};
    if (kv.key.empty()) throw ConfigError(fmt::format("line {}: empty key", line_no));
    if (!seen.insert(kv.key).second)
      throw ConfigError(fmt::format("line {}: key '{}' given twice", line_no, kv.key));
    out.push_back(std::move(kv));
  }
  return out;
}

KeyValue split_override(std::string_view assignment) {
  const size_t sep = assignment.find('=');
  if (sep == std::string_view::npos)
    throw ConfigError(fmt::format("override '{}' is not key=value", assignment));
  return {std::string(trim(assignment.substr(0, sep))), std::string(trim(assignment.substr(sep + 1))), 0};
}

double parse_double_value(std::string_view key, std::string_view value) {
  double v = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, value));
  return v;
}

long long parse_int_value(std::string_view key, std::string_view value) {
  long long v = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, value));
  return v;
}

bool parse_bool_value(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, value));
}

}  // namespace gunpose
