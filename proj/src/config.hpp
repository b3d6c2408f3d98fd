#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace rbsam::cli {

// Raised for every configuration problem: unreadable file, syntax error,
// unknown key, missing required key, or a value outside its documented
// range. The message carries file and line context where available.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

using ConfigMap = std::map<std::string, std::string>;

// Parses flat key = value text. Blank lines and lines starting with '#'
// are skipped; keys and values are whitespace-trimmed; duplicate keys,
// missing '=', empty keys, and empty values are errors reported as
// "<name>:<line>: <message>".
ConfigMap parse_config_text(const std::string &text, const std::string &name);
ConfigMap parse_config_file(const std::string &path);

// Mesh resolution: "1/N" with integer N, or a decimal equal to 1/N.
// Returns N, restricted to [2, 512].
int parse_mesh_cells(const std::string &text);

// Configuration for one command with every key present: user-supplied
// values validated against the command schema, absent optional keys
// filled from documented defaults.
struct ResolvedConfig {
  std::string command;
  std::map<std::string, std::string> values;

  bool has(const std::string &key) const { return values.count(key) > 0; }
  const std::string &gets(const std::string &key) const;
  int geti(const std::string &key) const;
  double getd(const std::string &key) const;
  bool getb(const std::string &key) const;
  std::uint64_t getseed(const std::string &key) const;
  int mesh_cells(const std::string &key) const;
};

// Validates the raw map against the schema of the named command: rejects
// unknown keys and out-of-range values, requires the command's required
// keys, fills defaults for the rest.
ResolvedConfig resolve_config(const ConfigMap &raw, const std::string &command);

} // namespace rbsam::cli
