#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace rbsam::cli {

namespace {

std::string trim(const std::string &s) {
  const std::string ws = " \t\r\n";
  const size_t a = s.find_first_not_of(ws);
  if (a == std::string::npos)
    return "";
  const size_t b = s.find_last_not_of(ws);
  return s.substr(a, b - a + 1);
}

bool parse_full_double(const std::string &text, double &out) {
  if (text.empty())
    return false;
  char *end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

bool parse_full_long(const std::string &text, long &out) {
  if (text.empty())
    return false;
  char *end = nullptr;
  out = std::strtol(text.c_str(), &end, 10);
  return end == text.c_str() + text.size();
}

bool parse_full_u64(const std::string &text, unsigned long long &out) {
  if (text.empty() || text[0] == '-' || text[0] == '+')
    return false;
  char *end = nullptr;
  out = std::strtoull(text.c_str(), &end, 10);
  return end == text.c_str() + text.size();
}

enum class KeyType { integer, real, boolean, word, mesh, seed, text };

struct KeySpec {
  const char *name;
  KeyType type;
  bool required;
  const char *fallback;
  double lo = 0.0;
  double hi = 0.0;
  bool lo_open = false;
  bool hi_open = false;
  const char *words = "";
};

const std::vector<KeySpec> &schema_for(const std::string &command) {
  const KeySpec out{"out", KeyType::text, false, "out", 1, 0};
  const KeySpec seed{"seed", KeyType::seed, false, "0"};
  const KeySpec h{"h", KeyType::mesh, false, "1/16"};
  const KeySpec epsilon{"epsilon", KeyType::real, true, "", 0, 1, true, false};
  const KeySpec grid{"grid", KeyType::integer, false, "32", 2, 4096};
  const KeySpec tol{"tol", KeyType::real, false, "1e-6", 0, 1e6};
  const KeySpec n_max{"n_max", KeyType::integer, false, "10", 1, 200};
  const KeySpec validate{"validate", KeyType::boolean, false, "false"};
  const KeySpec delta{"delta", KeyType::real, false, "0.1", 0, 1, true, true};

  static const std::map<std::string, std::vector<KeySpec>> schemas = {
      {"build-truth", {h, epsilon, out, seed}},
      {"sga", {h, epsilon, grid, tol, n_max, validate, out, seed}},
      {"sga-dou",
       {h, epsilon, grid, tol, n_max, delta,
        {"mode", KeyType::word, false, "greedy", 0, 0, false, false,
         "greedy full"},
        {"floor_stop", KeyType::real, false, "1.5", 0, 1e6},
        validate, out, seed}},
      {"wgreedy",
       {{"decay", KeyType::word, false, "poly-1", 0, 0, false, false,
         "poly-half poly-1 poly-2 exp-sqrt geometric"},
        {"dim", KeyType::integer, false, "32", 1, 2000},
        {"gamma", KeyType::real, false, "1", 0, 1, true, false},
        {"n_max", KeyType::integer, false, "16", 1, 200},
        {"mode", KeyType::word, false, "exact", 0, 0, false, false,
         "exact adversarial"},
        {"alpha", KeyType::real, false, "0", 0, 100},
        {"m_const", KeyType::real, false, "0", 0, 1e6},
        {"trace_in", KeyType::text, false, "", 0, 0},
        out, seed}},
      {"goal",
       {h, epsilon, grid, delta,
        {"n_total", KeyType::integer, false, "8", 2, 200},
        {"alpha", KeyType::real, false, "1", 0, 100, true, false},
        {"beta", KeyType::real, false, "1", 0, 100, true, false},
        {"box_lo", KeyType::real, false, "0.7", 0, 1, false, true},
        {"box_hi", KeyType::real, false, "0.9", 0, 1, true, false},
        out, seed}},
      {"report", {out}},
  };

  const auto it = schemas.find(command);
  if (it == schemas.end())
    throw ConfigError("unknown command '" + command +
                      "'; expected build-truth, sga, sga-dou, wgreedy, goal, "
                      "or report");
  return it->second;
}

std::string range_text(const KeySpec &spec) {
  std::ostringstream os;
  os << (spec.lo_open ? "(" : "[") << spec.lo << ", " << spec.hi
     << (spec.hi_open ? ")" : "]");
  return os.str();
}

bool in_range(const KeySpec &spec, double v) {
  if (spec.lo_open ? v <= spec.lo : v < spec.lo)
    return false;
  if (spec.hi_open ? v >= spec.hi : v > spec.hi)
    return false;
  return true;
}

std::string validate_value(const KeySpec &spec, const std::string &value) {
  const std::string where = "key '" + std::string(spec.name) + "': ";
  switch (spec.type) {
  case KeyType::integer: {
    long v = 0;
    if (!parse_full_long(value, v))
      throw ConfigError(where + "expected an integer, got '" + value + "'");
    if (!in_range(spec, static_cast<double>(v)))
      throw ConfigError(where + "value " + value + " outside " +
                        range_text(spec));
    return value;
  }
  case KeyType::real: {
    double v = 0.0;
    if (!parse_full_double(value, v))
      throw ConfigError(where + "expected a number, got '" + value + "'");
    if (!in_range(spec, v))
      throw ConfigError(where + "value " + value + " outside " +
                        range_text(spec));
    return value;
  }
  case KeyType::boolean: {
    if (value == "true" || value == "1" || value == "yes")
      return "true";
    if (value == "false" || value == "0" || value == "no")
      return "false";
    throw ConfigError(where + "expected true or false, got '" + value + "'");
  }
  case KeyType::word: {
    std::istringstream ws(spec.words);
    std::string w;
    while (ws >> w)
      if (w == value)
        return value;
    throw ConfigError(where + "expected one of {" + spec.words + "}, got '" +
                      value + "'");
  }
  case KeyType::mesh: {
    try {
      parse_mesh_cells(value);
    } catch (const ConfigError &e) {
      throw ConfigError(where + e.what());
    }
    return value;
  }
  case KeyType::seed: {
    unsigned long long v = 0;
    if (!parse_full_u64(value, v))
      throw ConfigError(where + "expected an unsigned integer, got '" + value +
                        "'");
    return value;
  }
  case KeyType::text: {
    if (value.size() < static_cast<size_t>(spec.lo))
      throw ConfigError(where + "must not be empty");
    return value;
  }
  }
  throw ConfigError(where + "unhandled key type");
}

} // namespace

ConfigMap parse_config_text(const std::string &text, const std::string &name) {
  std::istringstream in(text);
  ConfigMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(line);
    if (s.empty() || s[0] == '#')
      continue;
    const std::string at = name + ":" + std::to_string(lineno) + ": ";
    const size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(at + "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError(at + "empty key");
    if (value.empty())
      throw ConfigError(at + "empty value for key '" + key + "'");
    if (out.count(key) > 0)
      throw ConfigError(at + "duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

ConfigMap parse_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

int parse_mesh_cells(const std::string &text) {
  const std::string msg =
      "mesh resolution must be 1/N or the equal decimal, N in [2, 512]; "
      "got '" +
      text + "'";
  const size_t slash = text.find('/');
  if (slash != std::string::npos) {
    long n = 0;
    if (trim(text.substr(0, slash)) != "1" ||
        !parse_full_long(trim(text.substr(slash + 1)), n) || n < 2 || n > 512)
      throw ConfigError(msg);
    return static_cast<int>(n);
  }
  double d = 0.0;
  if (!parse_full_double(text, d) || d <= 0.0 || d > 0.5)
    throw ConfigError(msg);
  const double inv = 1.0 / d;
  const long n = std::lround(inv);
  if (n < 2 || n > 512 || std::abs(inv - static_cast<double>(n)) > 1e-6 * inv)
    throw ConfigError(msg);
  return static_cast<int>(n);
}

const std::string &ResolvedConfig::gets(const std::string &key) const {
  const auto it = values.find(key);
  if (it == values.end())
    throw std::logic_error("config key not resolved: " + key);
  return it->second;
}

int ResolvedConfig::geti(const std::string &key) const {
  return static_cast<int>(std::strtol(gets(key).c_str(), nullptr, 10));
}

double ResolvedConfig::getd(const std::string &key) const {
  return std::strtod(gets(key).c_str(), nullptr);
}

bool ResolvedConfig::getb(const std::string &key) const {
  return gets(key) == "true";
}

std::uint64_t ResolvedConfig::getseed(const std::string &key) const {
  return std::strtoull(gets(key).c_str(), nullptr, 10);
}

int ResolvedConfig::mesh_cells(const std::string &key) const {
  return parse_mesh_cells(gets(key));
}

ResolvedConfig resolve_config(const ConfigMap &raw,
                              const std::string &command) {
  const std::vector<KeySpec> &schema = schema_for(command);
  for (const auto &[key, value] : raw) {
    bool known = false;
    for (const KeySpec &spec : schema)
      known = known || key == spec.name;
    if (!known)
      throw ConfigError("unknown key '" + key + "' for command '" + command +
                        "'");
  }
  ResolvedConfig out;
  out.command = command;
  for (const KeySpec &spec : schema) {
    const auto it = raw.find(spec.name);
    if (it == raw.end() && spec.required)
      throw ConfigError("missing required key: " + std::string(spec.name));
    const std::string &value = it == raw.end() ? spec.fallback : it->second;
    out.values[spec.name] = validate_value(spec, value);
  }
  return out;
}

} // namespace rbsam::cli
