#include "log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

#include "error.hpp"

namespace toolmem {

namespace {

std::atomic<LogLevel> g_level{LogLevel::info};
std::mutex g_stream_mutex;

void emit(const char* tag, const std::string& message) {
    std::lock_guard<std::mutex> lock(g_stream_mutex);
    std::cerr << "toolmem[" << tag << "]: " << message << "\n";
}

}  // namespace

LogLevel log_level_from_name(const std::string& name) {
    if (name == "quiet") return LogLevel::quiet;
    if (name == "info") return LogLevel::info;
    if (name == "debug") return LogLevel::debug;
    throw Error(ErrorCode::validation,
                "unknown log verbosity '" + name + "' (expected quiet, info, or debug)");
}

const char* log_level_name(LogLevel level) {
    switch (level) {
        case LogLevel::quiet: return "quiet";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "info";
}

void set_log_level(LogLevel level) { g_level.store(level); }

LogLevel log_level() { return g_level.load(); }

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::info) emit("info", message);
}

void log_debug(const std::string& message) {
    if (log_level() >= LogLevel::debug) emit("debug", message);
}

}  // namespace toolmem
