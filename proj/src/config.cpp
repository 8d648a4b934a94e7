//
// Project moldream - Copyright 2026 The moldream Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "moldream/config.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "moldream/error.h"

namespace moldream {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("not a number: '" + std::string(text) + "'");
  return v;
}

std::int64_t parse_int(std::string_view text) {
  text = trim(text);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("not an integer: '" + std::string(text) + "'");
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  int lineno = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;

    if (size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;

    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno)
                        + ": expected 'key = value'");
    }
    std::string_view key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string &path) {
  return parse(read_file(path));
}

std::optional<std::string> KeyValueConfig::get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string &key,
                                       const std::string &fallback) const {
  return get(key).value_or(fallback);
}

double KeyValueConfig::get_double(const std::string &key,
                                  double fallback) const {
  auto v = get(key);
  if (!v)
    return fallback;
  try {
    return parse_double(*v);
  } catch (const ConfigError &e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::int64_t KeyValueConfig::get_int(const std::string &key,
                                     std::int64_t fallback) const {
  auto v = get(key);
  if (!v)
    return fallback;
  try {
    return parse_int(*v);
  } catch (const ConfigError &e) {
    throw ConfigError(key + ": " + e.what());
  }
}

bool KeyValueConfig::get_bool(const std::string &key, bool fallback) const {
  auto v = get(key);
  if (!v)
    return fallback;
  if (*v == "true" || *v == "1" || *v == "on" || *v == "yes")
    return true;
  if (*v == "false" || *v == "0" || *v == "off" || *v == "no")
    return false;
  throw ConfigError(key + ": not a boolean: '" + *v + "'");
}

double KeyValueConfig::require_double(const std::string &key) const {
  if (!contains(key))
    throw ConfigError("missing key '" + key + "'");
  return get_double(key, 0.0);
}

}  // namespace moldream
