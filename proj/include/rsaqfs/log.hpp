#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string_view>

namespace rsaqfs::log {

enum class Level { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from RSA_SUMM_LOG={error|info|debug}; anything else means info.
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("RSA_SUMM_LOG");
    if (env == nullptr) return Level::kInfo;
    std::string_view v(env);
    if (v == "error") return Level::kError;
    if (v == "debug") return Level::kDebug;
    return Level::kInfo;
  }();
  return level;
}

template <typename... Args>
void write(Level level, const Args&... args) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  static std::mutex mu;
  std::ostringstream line;
  constexpr std::string_view kTags[] = {"[error] ", "[info] ", "[debug] "};
  line << kTags[static_cast<int>(level)];
  (line << ... << args);
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << line.str() << '\n';
}

template <typename... Args>
void error(const Args&... args) { write(Level::kError, args...); }
template <typename... Args>
void info(const Args&... args) { write(Level::kInfo, args...); }
template <typename... Args>
void debug(const Args&... args) { write(Level::kDebug, args...); }

}  // namespace rsaqfs::log
