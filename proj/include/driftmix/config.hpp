#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "driftmix/format.hpp"

namespace driftmix {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// All model hyper-parameters. Defaults follow the reference setting for
/// 20-dimensional features (theta_match 4.8 covers roughly the central 68%
/// of a well-fit mode's own samples).
struct ModelConfig {
  std::size_t dimension = 20;
  double alpha = 0.01;        // model update rate, in (0,1)
  double theta_match = 4.8;   // Mahalanobis hit threshold
  double w0 = 0.001;          // initial weight of a created mode
  std::vector<double> z{4.0}; // initial variance; one entry broadcasts to all dims
  double g = 0.95;            // cumulative-weight threshold for the normal set
  double theta_bhat = 0.95;   // Bhattacharyya merge threshold
  std::optional<std::int64_t> capacity;  // present => capped model (AGMM)
  bool merge_enabled = true;             // false for the capped baseline
  double variance_floor = 1e-6;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline double parse_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("field '" + field + "': cannot parse number from '" + text + "'");
  }
  return value;
}

inline std::int64_t parse_int(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("field '" + field + "': cannot parse integer from '" + text + "'");
  }
  return value;
}

inline bool parse_bool(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("field '" + field + "': expected true/false, got '" + text + "'");
}

inline std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(item, field));
  }
  if (out.empty()) throw ConfigError("field '" + field + "': empty value");
  return out;
}

/// Flat `key = value` file with '#' comments. Returns entries in file order.
inline std::vector<std::pair<std::string, std::string>> parse_kv_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                        stripped + "'");
    }
    entries.emplace_back(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return entries;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open file for writing: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace detail

/// Checks every field against its allowed range; throws ConfigError naming
/// the offending field, returns the config unchanged otherwise.
inline const ModelConfig& validate_config(const ModelConfig& cfg) {
  if (cfg.dimension < 1) throw ConfigError("field 'dimension': must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw ConfigError("field 'alpha': must lie in (0,1); update rate must be strictly positive");
  if (!(cfg.theta_match > 0.0)) throw ConfigError("field 'theta_match': must be > 0");
  if (!(cfg.w0 > 0.0 && cfg.w0 < 1.0)) throw ConfigError("field 'w0': must lie in (0,1)");
  if (cfg.z.size() != 1 && cfg.z.size() != cfg.dimension)
    throw ConfigError("field 'Z': expected a scalar or a vector of length 'dimension'");
  for (double v : cfg.z)
    if (!(v > 0.0)) throw ConfigError("field 'Z': every entry must be > 0");
  if (!(cfg.g > 0.0 && cfg.g <= 1.0)) throw ConfigError("field 'G': must lie in (0,1]");
  if (!(cfg.theta_bhat > 0.0)) throw ConfigError("field 'theta_bhat': must be > 0");
  if (cfg.capacity && *cfg.capacity < 1)
    throw ConfigError("field 'K': capacity must be >= 1 when present");
  if (!(cfg.variance_floor > 0.0)) throw ConfigError("field 'variance_floor': must be > 0");
  return cfg;
}

inline ModelConfig config_from_kv(const std::vector<std::pair<std::string, std::string>>& entries) {
  ModelConfig cfg;
  for (const auto& [key, value] : entries) {
    if (key == "dimension") {
      const auto d = detail::parse_int(value, key);
      if (d < 1) throw ConfigError("field 'dimension': must be >= 1");
      cfg.dimension = static_cast<std::size_t>(d);
    } else if (key == "alpha") {
      cfg.alpha = detail::parse_double(value, key);
    } else if (key == "theta_match") {
      cfg.theta_match = detail::parse_double(value, key);
    } else if (key == "w0") {
      cfg.w0 = detail::parse_double(value, key);
    } else if (key == "Z") {
      cfg.z = detail::parse_double_list(value, key);
    } else if (key == "G") {
      cfg.g = detail::parse_double(value, key);
    } else if (key == "theta_bhat") {
      cfg.theta_bhat = detail::parse_double(value, key);
    } else if (key == "K") {
      cfg.capacity = detail::parse_int(value, key);
    } else if (key == "merge_enabled") {
      cfg.merge_enabled = detail::parse_bool(value, key);
    } else if (key == "variance_floor") {
      cfg.variance_floor = detail::parse_double(value, key);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

inline ModelConfig load_config(const std::string& path) {
  ModelConfig cfg = config_from_kv(detail::parse_kv_text(detail::read_text_file(path)));
  validate_config(cfg);
  return cfg;
}

/// Canonical flat-text form; parseable by load_config and stable across
/// runs, so it doubles as the hashing/echo representation.
inline std::string serialize_config(const ModelConfig& cfg) {
  std::ostringstream out;
  out << "dimension = " << cfg.dimension << '\n';
  out << "alpha = " << format_double(cfg.alpha) << '\n';
  out << "theta_match = " << format_double(cfg.theta_match) << '\n';
  out << "w0 = " << format_double(cfg.w0) << '\n';
  out << "Z = ";
  for (std::size_t i = 0; i < cfg.z.size(); ++i) {
    if (i > 0) out << ", ";
    out << format_double(cfg.z[i]);
  }
  out << '\n';
  out << "G = " << format_double(cfg.g) << '\n';
  out << "theta_bhat = " << format_double(cfg.theta_bhat) << '\n';
  if (cfg.capacity) out << "K = " << *cfg.capacity << '\n';
  out << "merge_enabled = " << (cfg.merge_enabled ? "true" : "false") << '\n';
  out << "variance_floor = " << format_double(cfg.variance_floor) << '\n';
  return out.str();
}

inline std::string config_hash(const ModelConfig& cfg) {
  return hex16(fnv1a64(serialize_config(cfg)));
}

/// Convenience constructors for the two canonical setups.
inline ModelConfig uagmm_config(std::size_t dimension = 20) {
  ModelConfig cfg;
  cfg.dimension = dimension;
  cfg.merge_enabled = true;
  cfg.capacity.reset();
  return cfg;
}

inline ModelConfig agmm_config(std::int64_t capacity, std::size_t dimension = 20) {
  ModelConfig cfg;
  cfg.dimension = dimension;
  cfg.merge_enabled = false;
  cfg.capacity = capacity;
  return cfg;
}

}  // namespace driftmix
