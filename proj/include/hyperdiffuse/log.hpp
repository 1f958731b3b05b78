#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace hyperdiffuse {

// Log level is read once from HYPERDIFFUSE_LOG (error|warn|info|debug).
// Default is warn.
enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("HYPERDIFFUSE_LOG");
        if (env == nullptr) return LogLevel::warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::error;
        if (std::strcmp(env, "info") == 0) return LogLevel::info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
        return LogLevel::warn;
    }();
    return level;
}

inline void log_msg(LogLevel lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
    const char* tag = lvl == LogLevel::error  ? "error"
                      : lvl == LogLevel::warn ? "warn"
                      : lvl == LogLevel::info ? "info"
                                              : "debug";
    std::fprintf(stderr, "[hyperdiffuse:%s] %s\n", tag, msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::error, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::debug, msg); }

}  // namespace hyperdiffuse
