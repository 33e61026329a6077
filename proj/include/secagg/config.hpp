#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace secagg {

// Flat "[section]" + "key = value" text; keys are stored as
// "section.key".  Blank lines and lines starting with '#' or ';' are
// ignored.  Duplicate keys are an error, so a config never silently
// overrides itself.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string &text);
ConfigMap load_config_file(const std::string &path);

// typed lookups; the *_or forms fall back on a missing key, the
// required forms throw ParamError naming the key
std::string cfg_str(const ConfigMap &c, const std::string &key);
std::string cfg_str_or(const ConfigMap &c, const std::string &key,
                       const std::string &fallback);
uint64_t cfg_u64_or(const ConfigMap &c, const std::string &key,
                    uint64_t fallback);
double cfg_f64_or(const ConfigMap &c, const std::string &key, double fallback);
bool cfg_bool_or(const ConfigMap &c, const std::string &key, bool fallback);

}  // namespace secagg
