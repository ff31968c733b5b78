#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <string_view>

namespace driftmix {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Level comes from the DRIFTMIX_LOG environment variable
/// (error | info | debug); anything else falls back to info.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("DRIFTMIX_LOG");
    if (env) {
      const std::string_view v(env);
      if (v == "error") return LogLevel::error;
      if (v == "debug") return LogLevel::debug;
    }
    return LogLevel::info;
  }();
  return level;
}

inline void log_error(const std::string& msg) {
  std::cerr << "[driftmix] error: " << msg << '\n';
}

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << "[driftmix] " << msg << '\n';
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << "[driftmix] debug: " << msg << '\n';
}

}  // namespace driftmix
