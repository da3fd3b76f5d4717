#pragma once

#include <string>

namespace chainnet {

// Verbosity comes from the CHAINNET_LOG environment variable:
// quiet | warn | info (default) | debug.
enum class LogLevel { Quiet = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level();
void set_log_level(LogLevel lvl);

void log_warn(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace chainnet
