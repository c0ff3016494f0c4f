#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "ledger.hpp"

namespace toolmem {

namespace {

[[noreturn]] void parse_error_at(const std::string& text, std::size_t byte_offset,
                                 const std::string& detail) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    throw Error(ErrorCode::parse, "config parse error at line " + std::to_string(line) +
                                      ", column " + std::to_string(column) + ": " + detail);
}

void require(bool ok, const std::string& field, const std::string& why) {
    if (!ok) {
        throw Error(ErrorCode::validation, "config field '" + field + "': " + why);
    }
}

void apply_mirror(AppConfig& config, const Value& mirror) {
    require(mirror.is_object(), "mirror", "must be an object");
    for (const auto& [key, value] : mirror.items()) {
        if (key == "threshold_bytes") {
            require(value.is_number_integer() && value.get<std::int64_t>() > 0,
                    "mirror.threshold_bytes", "must be a positive integer");
            config.mirror.threshold_bytes = value.get<std::size_t>();
        } else if (key == "name_suffix") {
            require(value.is_string(), "mirror.name_suffix", "must be a string");
            config.mirror.name_suffix = value.get<std::string>();
        } else if (key == "base_template") {
            require(value.is_string(), "mirror.base_template", "must be a string");
            config.mirror.base_template = value.get<std::string>();
        } else if (key == "keys_addendum_template") {
            require(value.is_string(), "mirror.keys_addendum_template", "must be a string");
            config.mirror.keys_addendum_template = value.get<std::string>();
        } else {
            throw Error(ErrorCode::validation, "unknown config key 'mirror." + key + "'");
        }
    }
}

void apply_env_overrides(AppConfig& config) {
    if (const char* threshold = std::getenv("TOOLMEM_THRESHOLD_BYTES")) {
        try {
            const long long parsed = std::stoll(threshold);
            require(parsed > 0, "TOOLMEM_THRESHOLD_BYTES", "must be a positive integer");
            config.mirror.threshold_bytes = static_cast<std::size_t>(parsed);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(ErrorCode::validation,
                        "config field 'TOOLMEM_THRESHOLD_BYTES': must be a positive integer");
        }
    }
    if (const char* counter = std::getenv("TOOLMEM_COUNTER")) {
        make_counter(counter);  // throws on unknown schemes
        config.counter_id = counter;
    }
}

}  // namespace

AppConfig load_config_text(const std::string& text) {
    AppConfig config;

    std::string trimmed = text;
    const auto first = trimmed.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) trimmed.clear();

    if (!trimmed.empty()) {
        Value root;
        try {
            root = Value::parse(text);
        } catch (const nlohmann::json::parse_error& error) {
            parse_error_at(text, error.byte > 0 ? error.byte - 1 : 0, error.what());
        }
        require(root.is_object(), "<root>", "config must be a JSON object");

        for (const auto& [key, value] : root.items()) {
            if (key == "endpoints") {
                require(value.is_array(), "endpoints", "must be an array of strings");
                for (const Value& endpoint : value) {
                    require(endpoint.is_string(), "endpoints", "must be an array of strings");
                    require(!endpoint.get<std::string>().empty(), "endpoints",
                            "entries must be nonempty");
                    config.endpoints.push_back(endpoint.get<std::string>());
                }
            } else if (key == "mirror") {
                apply_mirror(config, value);
            } else if (key == "counter") {
                require(value.is_string(), "counter", "must be a string");
                try {
                    make_counter(value.get<std::string>());
                } catch (const Error&) {
                    throw Error(ErrorCode::validation,
                                "config field 'counter': unknown scheme '" +
                                    value.get<std::string>() + "'");
                }
                config.counter_id = value.get<std::string>();
            } else if (key == "context_limit_tokens") {
                require(value.is_number_integer() && value.get<std::int64_t>() > 0,
                        "context_limit_tokens", "must be a positive integer");
                config.context_limit_tokens = value.get<std::uint64_t>();
            } else if (key == "store_capacity_bytes") {
                if (value.is_null()) {
                    config.store_capacity_bytes.reset();
                } else {
                    require(value.is_number_integer() && value.get<std::int64_t>() > 0,
                            "store_capacity_bytes",
                            "must be a positive integer or null for unlimited");
                    config.store_capacity_bytes = value.get<std::uint64_t>();
                }
            } else if (key == "log_verbosity") {
                require(value.is_string(), "log_verbosity", "must be a string");
                try {
                    config.log_verbosity = log_level_from_name(value.get<std::string>());
                } catch (const Error& error) {
                    throw Error(ErrorCode::validation,
                                std::string("config field 'log_verbosity': ") + error.what());
                }
            } else {
                throw Error(ErrorCode::validation, "unknown config key '" + key + "'");
            }
        }
    }

    apply_env_overrides(config);
    return config;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::file_not_found, "cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_config_text(buffer.str());
}

Value dump_config(const AppConfig& config) {
    Value out;
    out["endpoints"] = config.endpoints;
    out["mirror"] = Value{{"threshold_bytes", config.mirror.threshold_bytes},
                          {"name_suffix", config.mirror.name_suffix},
                          {"base_template", config.mirror.base_template},
                          {"keys_addendum_template", config.mirror.keys_addendum_template}};
    out["counter"] = config.counter_id;
    out["context_limit_tokens"] = config.context_limit_tokens;
    out["store_capacity_bytes"] =
        config.store_capacity_bytes ? Value(*config.store_capacity_bytes) : Value(nullptr);
    out["log_verbosity"] = log_level_name(config.log_verbosity);
    return out;
}

}  // namespace toolmem
