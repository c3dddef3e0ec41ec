#pragma once

#include <cstdio>

namespace ace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

/// Level from the ACE_LOG environment variable (quiet | info | debug),
/// resolved once; unset or unknown values mean quiet.
LogLevel log_level();

void log_printf(LogLevel level, const char* format, ...);

} // namespace ace

#define ACE_LOG_INFO(...) ::ace::log_printf(::ace::LogLevel::Info, __VA_ARGS__)
#define ACE_LOG_DEBUG(...) ::ace::log_printf(::ace::LogLevel::Debug, __VA_ARGS__)
