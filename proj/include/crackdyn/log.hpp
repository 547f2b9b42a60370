#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace crackdyn::log {

enum class level : int { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from CRACKDYN_LOG in {error, warn, info, debug}; default warn.
inline level threshold() {
    static const level cached = [] {
        const char* env = std::getenv("CRACKDYN_LOG");
        if (env == nullptr) return level::warn;
        if (std::strcmp(env, "error") == 0) return level::error;
        if (std::strcmp(env, "warn") == 0) return level::warn;
        if (std::strcmp(env, "info") == 0) return level::info;
        if (std::strcmp(env, "debug") == 0) return level::debug;
        return level::warn;
    }();
    return cached;
}

template <typename... Args>
inline void emit(level lv, const char* tag, const char* fmt, Args... args) {
    if (static_cast<int>(lv) > static_cast<int>(threshold())) return;
    std::fprintf(stderr, "[crackdyn:%s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

template <typename... Args>
inline void error(const char* fmt, Args... args) { emit(level::error, "error", fmt, args...); }
template <typename... Args>
inline void warn(const char* fmt, Args... args) { emit(level::warn, "warn", fmt, args...); }
template <typename... Args>
inline void info(const char* fmt, Args... args) { emit(level::info, "info", fmt, args...); }
template <typename... Args>
inline void debug(const char* fmt, Args... args) { emit(level::debug, "debug", fmt, args...); }

} // namespace crackdyn::log
