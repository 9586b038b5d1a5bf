// Copyright 2026 The GunPose Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gunpose {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// "key = value" (or "key: value") per line; blank lines and '#' comments are
// skipped. Throws ConfigError for lines without a separator or repeated keys.
std::vector<KeyValue> parse_key_values(std::string_view text);

// "key=value" as given on a command line.
KeyValue split_override(std::string_view assignment);

double parse_double_value(std::string_view key, std::string_view value);
long long parse_int_value(std::string_view key, std::string_view value);
bool parse_bool_value(std::string_view key, std::string_view value);

}  // namespace gunpose
