#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace sitnikov::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Level comes from SITNIKOV_LOG in {error, info, debug}; default error.
inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("SITNIKOV_LOG");
        if (env == nullptr) return Level::error;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        if (std::strcmp(env, "info") == 0) return Level::info;
        return Level::error;
    }();
    return lvl;
}

inline void emit(Level lvl, const char* fmt, ...) {
    if (lvl > threshold()) return;
    const char* tag = lvl == Level::error ? "error" : (lvl == Level::info ? "info" : "debug");
    std::fprintf(stderr, "[sitnikov %s] ", tag);
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
}

}  // namespace sitnikov::log

#define SITNIKOV_LOG_ERROR(...) ::sitnikov::log::emit(::sitnikov::log::Level::error, __VA_ARGS__)
#define SITNIKOV_LOG_INFO(...) ::sitnikov::log::emit(::sitnikov::log::Level::info, __VA_ARGS__)
#define SITNIKOV_LOG_DEBUG(...) ::sitnikov::log::emit(::sitnikov::log::Level::debug, __VA_ARGS__)
