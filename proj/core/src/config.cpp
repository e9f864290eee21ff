#include "sense/config.hpp"

#include <fstream>
#include <sstream>

namespace sense::io {

namespace {
std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  const auto b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path, {});
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key = value",
                        {line});
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno), {line});
    c.kv_[key] = val;
  }
  return c;
}

std::string Config::get_str(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing required key: " + key, {key});
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& def) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

double Config::get_double(const std::string& key) const {
  try {
    return std::stod(get_str(key));
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("key is not a number: " + key, {key});
  }
}

double Config::get_double(const std::string& key, double def) const {
  return has(key) ? get_double(key) : def;
}

long Config::get_long(const std::string& key) const {
  try {
    return std::stol(get_str(key));
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError("key is not an integer: " + key, {key});
  }
}

long Config::get_long(const std::string& key, long def) const {
  return has(key) ? get_long(key) : def;
}

bool Config::get_bool(const std::string& key, bool def) const {
  if (!has(key)) return def;
  const std::string v = get_str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key is not a boolean: " + key, {key});
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get_str(key));
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(trim(cell)));
    } catch (...) {
      throw ConfigError("list entry is not a number in key: " + key, {key});
    }
  }
  if (out.empty()) throw ConfigError("empty list for key: " + key, {key});
  return out;
}

}  // namespace sense::io
