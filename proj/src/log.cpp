#include "chainnet/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace chainnet {

namespace {

LogLevel g_level = [] {
    const char* env = std::getenv("CHAINNET_LOG");
    if (!env) return LogLevel::Info;
    if (!std::strcmp(env, "quiet")) return LogLevel::Quiet;
    if (!std::strcmp(env, "warn")) return LogLevel::Warn;
    if (!std::strcmp(env, "debug")) return LogLevel::Debug;
    return LogLevel::Info;
}();

std::mutex g_mu;

void emit(const char* tag, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mu);
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel lvl) { g_level = lvl; }

void log_warn(const std::string& msg) {
    if (g_level >= LogLevel::Warn) emit("warn", msg);
}

void log_info(const std::string& msg) {
    if (g_level >= LogLevel::Info) emit("info", msg);
}

void log_debug(const std::string& msg) {
    if (g_level >= LogLevel::Debug) emit("debug", msg);
}

}  // namespace chainnet
