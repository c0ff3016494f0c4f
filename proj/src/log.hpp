#pragma once

#include <string>

namespace toolmem {

/// Diagnostics go to standard error only; standard output stays clean for
/// the wire protocol in serve mode.
enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level_from_name(const std::string& name);
const char* log_level_name(LogLevel level);

void set_log_level(LogLevel level);
LogLevel log_level();

void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace toolmem
