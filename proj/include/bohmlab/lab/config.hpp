#ifndef BOHMLAB_LAB_CONFIG_HPP
#define BOHMLAB_LAB_CONFIG_HPP

#include <cerrno>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bohmlab/error.hpp"

namespace bohmlab::lab {

// Scenario files are plain text, one `key = value` per line. `#` starts a
// comment; blank lines are ignored.

struct ConfigValue {
  std::string text;
  std::size_t line = 0;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Config {
 public:
  Config() = default;
  explicit Config(std::string source) : source_(std::move(source)) {}

  static Config parse(std::istream& in, const std::string& source) {
    Config cfg(source);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) cfg.fail(line, "expected `key = value`");
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (key.empty()) cfg.fail(line, "missing key");
      if (value.empty()) cfg.fail(line, "missing value for `" + key + "`");
      if (cfg.values_.count(key)) cfg.fail(line, "duplicate key `" + key + "`");
      cfg.values_[key] = ConfigValue{value, line};
      cfg.order_.push_back(key);
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::configuration, path + ": cannot open config");
    return parse(in, path);
  }

  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return values_.empty(); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::vector<std::string>& keys() const noexcept { return order_; }
  std::size_t line_of(const std::string& key) const { return values_.at(key).line; }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw Error(ErrorKind::configuration, source_ + ":" + std::to_string(line) + ": " + what);
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::configuration, source_ + ": " + what);
  }

  std::string text(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail("missing required key `" + key + "`");
    return it->second.text;
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const {
    const ConfigValue& v = require(key);
    return to_number(v.text, v.line, key);
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> maybe_number(const std::string& key) const {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const double d = number(key);
    if (d < 0.0 || d != static_cast<double>(static_cast<std::size_t>(d)))
      fail(line_of(key), "`" + key + "` must be a non-negative integer");
    return static_cast<std::size_t>(d);
  }

  /// Comma-separated list of numbers.
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    const ConfigValue& v = require(key);
    std::vector<double> out;
    std::stringstream ss(v.text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(to_number(trim(cell), v.line, key));
    if (out.empty()) fail(v.line, "`" + key + "` needs at least one value");
    return out;
  }

 private:
  const ConfigValue& require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail("missing required key `" + key + "`");
    return it->second;
  }

  double to_number(const std::string& s, std::size_t line, const std::string& key) const {
    double out = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) fail(line, "`" + key + "` is not a number: " + s);
    return out;
  }

  std::string source_;
  std::map<std::string, ConfigValue> values_;
  std::vector<std::string> order_;
};

}  // namespace bohmlab::lab

#endif  // BOHMLAB_LAB_CONFIG_HPP
