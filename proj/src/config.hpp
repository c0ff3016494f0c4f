#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "log.hpp"
#include "mirror.hpp"
#include "value.hpp"

namespace toolmem {

struct AppConfig {
    std::vector<std::string> endpoints;  // upstream specs: command line or tcp:host:port
    MirrorConfig mirror;
    std::string counter_id = "bytes4";
    std::uint64_t context_limit_tokens = 1'000'000;
    std::optional<std::uint64_t> store_capacity_bytes;  // absent = unlimited
    LogLevel log_verbosity = LogLevel::info;
};

/// Parses, defaults, and validates. Empty input yields all defaults; unknown
/// keys are rejected by name; malformed JSON reports line and column.
/// Environment variables TOOLMEM_THRESHOLD_BYTES and TOOLMEM_COUNTER
/// override the file.
AppConfig load_config(const std::string& path);
AppConfig load_config_text(const std::string& text);

/// Normalized form; load(dump(c)) == c.
Value dump_config(const AppConfig& config);

}  // namespace toolmem
