#include "secagg/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "secagg/errors.hpp"

namespace secagg {

namespace {

std::string trim(const std::string &s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

ConfigMap parse_config_text(const std::string &text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line, section;
  uint32_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw ParseError("malformed section header '" + t + "'", line_no);
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ParseError("empty section name", line_no);
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected key = value, got '" + t + "'", line_no);
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (section.empty())
      throw ParseError("key '" + key + "' outside any section", line_no);
    std::string full = section + "." + key;
    if (!out.emplace(full, value).second)
      throw ParseError("duplicate key '" + full + "'", line_no);
  }
  return out;
}

ConfigMap load_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParamError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string cfg_str(const ConfigMap &c, const std::string &key) {
  auto it = c.find(key);
  if (it == c.end()) throw ParamError("missing config key '" + key + "'");
  return it->second;
}

std::string cfg_str_or(const ConfigMap &c, const std::string &key,
                       const std::string &fallback) {
  auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

uint64_t cfg_u64_or(const ConfigMap &c, const std::string &key,
                    uint64_t fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    size_t used = 0;
    uint64_t v = std::stoull(it->second, &used, 0);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception &) {
    throw ParamError("config key '" + key + "' is not an integer: '" +
                     it->second + "'");
  }
}

double cfg_f64_or(const ConfigMap &c, const std::string &key, double fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception &) {
    throw ParamError("config key '" + key + "' is not a number: '" +
                     it->second + "'");
  }
}

bool cfg_bool_or(const ConfigMap &c, const std::string &key, bool fallback) {
  auto it = c.find(key);
  if (it == c.end()) return fallback;
  const std::string &v = it->second;
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ParamError("config key '" + key + "' is not a boolean: '" + v + "'");
}

}  // namespace secagg
