#include "ace/log.hpp"

#include <cstdarg>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace ace {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ACE_LOG");
        if (env == nullptr) return LogLevel::Quiet;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Quiet;
    }();
    return level;
}

void log_printf(LogLevel level, const char* format, ...) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    static std::mutex mutex;
    const std::lock_guard<std::mutex> lock(mutex);
    std::fputs(level == LogLevel::Debug ? "[ace:debug] " : "[ace] ", stderr);
    va_list args;
    va_start(args, format);
    std::vfprintf(stderr, format, args);
    va_end(args);
    std::fputc('\n', stderr);
}

} // namespace ace
