//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLDREAM_CONFIG_H_
#define MOLDREAM_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace moldream {

// Plain `key = value` text. Blank lines and `#` comments are ignored; a
// repeated key keeps the last value.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::string &path);

  bool contains(const std::string &key) const {
    return values_.count(key) != 0;
  }

  std::optional<std::string> get(const std::string &key) const;

  // The typed getters throw ConfigError on malformed values.
  std::string get_string(const std::string &key,
                         const std::string &fallback) const;
  double get_double(const std::string &key, double fallback) const;
  std::int64_t get_int(const std::string &key, std::int64_t fallback) const;
  bool get_bool(const std::string &key, bool fallback) const;

  double require_double(const std::string &key) const;

  const std::map<std::string, std::string> &entries() const {
    return values_;
  }

  void set(const std::string &key, std::string value) {
    values_[key] = std::move(value);
  }

private:
  std::map<std::string, std::string> values_;
};

double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

// Shortest text that reads back to the same double.
std::string format_double(double v);

// Reads a whole file; throws IoError if it cannot be opened.
std::string read_file(const std::string &path);

}  // namespace moldream

#endif  // MOLDREAM_CONFIG_H_
