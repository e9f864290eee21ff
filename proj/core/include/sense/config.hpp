#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sense::io {

struct ConfigError : std::runtime_error {
  std::vector<std::string> offending_keys;
  ConfigError(const std::string& msg, std::vector<std::string> keys)
      : std::runtime_error(msg), offending_keys(std::move(keys)) {}
};

/// Flat `key = value` configuration, one entry per line, '#' comments,
/// sections by dotted keys. No nesting.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double def) const;
  long get_long(const std::string& key) const;
  long get_long(const std::string& key, long def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::vector<double> get_list(const std::string& key) const;  // comma separated

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace sense::io
