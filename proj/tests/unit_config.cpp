#include <cstdlib>
#include <string>

#include "doctest.h"
#include "config.hpp"
#include "error.hpp"

using namespace toolmem;

namespace {

/// Scoped environment override; the config loader reads these variables.
struct EnvGuard {
    std::string name;
    EnvGuard(const std::string& var, const std::string& value) : name(var) {
        ::setenv(var.c_str(), value.c_str(), 1);
    }
    ~EnvGuard() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("empty or blank config text yields all defaults") {
    for (const char* text : {"", "   \n\t  "}) {
        AppConfig config = load_config_text(text);
        CHECK(config.endpoints.empty());
        CHECK(config.mirror.threshold_bytes == 4096);
        CHECK(config.mirror.name_suffix == "_mirrored");
        CHECK(config.counter_id == "bytes4");
        CHECK(config.context_limit_tokens == 1'000'000);
        CHECK_FALSE(config.store_capacity_bytes.has_value());
        CHECK(config.log_verbosity == LogLevel::info);
    }
}

TEST_CASE("explicit settings override the defaults") {
    AppConfig config = load_config_text(R"({
        "endpoints": ["tcp:localhost:9000", "python3 srv.py"],
        "mirror": {"threshold_bytes": 256, "name_suffix": "_virtual"},
        "counter": "words",
        "context_limit_tokens": 5000,
        "store_capacity_bytes": 1048576,
        "log_verbosity": "debug"
    })");
    REQUIRE(config.endpoints.size() == 2);
    CHECK(config.endpoints[0] == "tcp:localhost:9000");
    CHECK(config.mirror.threshold_bytes == 256);
    CHECK(config.mirror.name_suffix == "_virtual");
    // Untouched mirror fields keep their defaults.
    CHECK(config.mirror.base_template.find("The result of the function {tool}") == 0);
    CHECK(config.counter_id == "words");
    CHECK(config.context_limit_tokens == 5000);
    CHECK(config.store_capacity_bytes == 1048576);
    CHECK(config.log_verbosity == LogLevel::debug);
}

TEST_CASE("null store capacity means unlimited") {
    AppConfig config = load_config_text(R"({"store_capacity_bytes": null})");
    CHECK_FALSE(config.store_capacity_bytes.has_value());
}

TEST_CASE("invalid values are rejected with the field name") {
    auto expect_validation = [](const std::string& text, const std::string& needle) {
        try {
            load_config_text(text);
            FAIL("expected an error for: " << text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::validation);
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_validation(R"({"mirror": {"threshold_bytes": 0}})", "mirror.threshold_bytes");
    expect_validation(R"({"mirror": {"threshold_bytes": -5}})", "mirror.threshold_bytes");
    expect_validation(R"({"context_limit_tokens": 0})", "context_limit_tokens");
    expect_validation(R"({"store_capacity_bytes": 0})", "store_capacity_bytes");
    expect_validation(R"({"counter": "tiktoken"})", "counter");
    expect_validation(R"({"endpoints": [""]})", "endpoints");
    expect_validation(R"({"endpoints": "not an array"})", "endpoints");
    expect_validation(R"({"log_verbosity": "loud"})", "log_verbosity");
    expect_validation(R"([1, 2, 3])", "config must be a JSON object");
}

TEST_CASE("unknown keys are named in the rejection") {
    try {
        load_config_text(R"({"thresold_bytes": 128})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::validation);
        CHECK(std::string(e.what()) == "unknown config key 'thresold_bytes'");
    }
    try {
        load_config_text(R"({"mirror": {"sufix": "_m"}})");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "unknown config key 'mirror.sufix'");
    }
}

TEST_CASE("malformed json reports line and column") {
    try {
        load_config_text("{\n  \"counter\": \"bytes4\",\n}");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
        std::string message = e.what();
        CHECK(message.find("config parse error at line 3, column 1") == 0);
    }
}

TEST_CASE("load_config distinguishes missing files from bad content") {
    try {
        load_config("/nonexistent/toolmem.json");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::file_not_found);
    }
}

TEST_CASE("dump and load are inverses") {
    AppConfig config = load_config_text(R"({
        "endpoints": ["tcp:h:1"],
        "mirror": {"threshold_bytes": 128},
        "counter": "words",
        "store_capacity_bytes": 4096,
        "log_verbosity": "quiet"
    })");
    Value dumped = dump_config(config);
    AppConfig back = load_config_text(dumped.dump());
    CHECK(back.endpoints == config.endpoints);
    CHECK(back.mirror.threshold_bytes == config.mirror.threshold_bytes);
    CHECK(back.mirror.base_template == config.mirror.base_template);
    CHECK(back.counter_id == config.counter_id);
    CHECK(back.context_limit_tokens == config.context_limit_tokens);
    CHECK(back.store_capacity_bytes == config.store_capacity_bytes);
    CHECK(back.log_verbosity == config.log_verbosity);
    CHECK(dump_config(back) == dumped);
}

TEST_CASE("environment variables override the file") {
    SUBCASE("threshold") {
        EnvGuard guard("TOOLMEM_THRESHOLD_BYTES", "512");
        AppConfig config = load_config_text(R"({"mirror": {"threshold_bytes": 128}})");
        CHECK(config.mirror.threshold_bytes == 512);
    }
    SUBCASE("counter") {
        EnvGuard guard("TOOLMEM_COUNTER", "words");
        AppConfig config = load_config_text(R"({"counter": "bytes4"})");
        CHECK(config.counter_id == "words");
    }
    SUBCASE("invalid threshold") {
        EnvGuard guard("TOOLMEM_THRESHOLD_BYTES", "not-a-number");
        CHECK_THROWS_AS(load_config_text("{}"), Error);
    }
    SUBCASE("non-positive threshold") {
        EnvGuard guard("TOOLMEM_THRESHOLD_BYTES", "0");
        CHECK_THROWS_AS(load_config_text("{}"), Error);
    }
    SUBCASE("invalid counter scheme") {
        EnvGuard guard("TOOLMEM_COUNTER", "tiktoken");
        CHECK_THROWS_AS(load_config_text("{}"), Error);
    }
}

TEST_CASE("log level names round-trip") {
    CHECK(log_level_from_name("quiet") == LogLevel::quiet);
    CHECK(log_level_from_name("info") == LogLevel::info);
    CHECK(log_level_from_name("debug") == LogLevel::debug);
    CHECK(std::string(log_level_name(LogLevel::debug)) == "debug");
    CHECK_THROWS_AS(log_level_from_name("silent"), Error);
}
