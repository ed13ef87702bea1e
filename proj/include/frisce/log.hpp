#pragma once

#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

namespace frisce::log {

enum class Level : int { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from FRIS_CE_LOG (error|warn|info|debug); default warn.
inline Level threshold() {
    static const Level lvl = [] {
        const char* env = std::getenv("FRIS_CE_LOG");
        if (!env) return Level::warn;
        const std::string_view v(env);
        if (v == "error") return Level::error;
        if (v == "warn") return Level::warn;
        if (v == "info") return Level::info;
        if (v == "debug") return Level::debug;
        std::fprintf(stderr, "[fris-ce] warn: unknown FRIS_CE_LOG value '%s', using warn\n",
                     env);
        return Level::warn;
    }();
    return lvl;
}

namespace detail {
inline std::mutex& mu() {
    static std::mutex m;
    return m;
}
inline const char* tag(Level l) {
    switch (l) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        default: return "debug";
    }
}
}  // namespace detail

template <typename... Args>
void emit(Level lvl, Args&&... args) {
    if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
    std::ostringstream os;
    (os << ... << args);
    std::lock_guard<std::mutex> lock(detail::mu());
    std::fprintf(stderr, "[fris-ce] %s: %s\n", detail::tag(lvl), os.str().c_str());
}

template <typename... Args>
void error(Args&&... args) { emit(Level::error, std::forward<Args>(args)...); }
template <typename... Args>
void warn(Args&&... args) { emit(Level::warn, std::forward<Args>(args)...); }
template <typename... Args>
void info(Args&&... args) { emit(Level::info, std::forward<Args>(args)...); }
template <typename... Args>
void debug(Args&&... args) { emit(Level::debug, std::forward<Args>(args)...); }

}  // namespace frisce::log
