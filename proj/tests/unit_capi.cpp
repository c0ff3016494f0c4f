#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "toolmem/toolmem.h"

using nlohmann::json;

namespace {

const std::string kFixtures = TOOLMEM_FIXTURE_DIR;

/// Frees C-API strings on scope exit.
struct OwnedString {
    char* text = nullptr;
    ~OwnedString() { toolmem_string_free(text); }
    std::string str() const { return text == nullptr ? std::string() : text; }
};

}  // namespace

TEST_CASE("library identity and status names") {
    CHECK(std::string(toolmem_version()) == "1.0.0");
    CHECK(std::string(toolmem_status_name(TOOLMEM_OK)) == "OK");
    CHECK(std::string(toolmem_status_name(TOOLMEM_E_DANGLING_PATH)) == "DanglingPath");
    CHECK(std::string(toolmem_status_name(TOOLMEM_E_CAPACITY_EXCEEDED)) ==
          "CapacityExceeded");
    CHECK(toolmem_last_error() != nullptr);
    CHECK(std::string(toolmem_path_grammar()).find("[A-Za-z0-9_]+-") != std::string::npos);
}

TEST_CASE("store handles put, get, render, list, clear") {
    toolmem_store* store = toolmem_store_new(0);
    REQUIRE(store != nullptr);
    REQUIRE(toolmem_store_seed_uuids(store, 11) == TOOLMEM_OK);

    OwnedString path;
    REQUIRE(toolmem_store_put_json(store, "grid", R"({"shape":[2],"raw_grid":[0.5,1.5]})",
                                   &path.text) == TOOLMEM_OK);
    CHECK(toolmem_store_contains(store, path.text) == 1);
    CHECK(toolmem_store_contains(store, (path.str() + "/shape").c_str()) == 1);
    CHECK(toolmem_store_contains(store, "nope") == 0);

    OwnedString value;
    REQUIRE(toolmem_store_get_json(store, path.text, &value.text) == TOOLMEM_OK);
    CHECK(json::parse(value.str()) == json::parse(R"({"raw_grid":[0.5,1.5],"shape":[2]})"));

    OwnedString rendered;
    REQUIRE(toolmem_store_render(store, (path.str() + "/shape").c_str(), &rendered.text) ==
            TOOLMEM_OK);
    CHECK(rendered.str() == "[2]");

    OwnedString text_path;
    REQUIRE(toolmem_store_put_text(store, "tika", "document body", &text_path.text) ==
            TOOLMEM_OK);
    OwnedString text_rendered;
    REQUIRE(toolmem_store_render(store, text_path.text, &text_rendered.text) == TOOLMEM_OK);
    CHECK(text_rendered.str() == "document body");

    OwnedString listing;
    REQUIRE(toolmem_store_list(store, nullptr, &listing.text) == TOOLMEM_OK);
    json entries = json::parse(listing.str());
    REQUIRE(entries.size() == 4);  // base + two children + the text entry
    CHECK(entries[0]["path"] == path.str());
    CHECK(entries[0]["kind"] == "object");
    CHECK_FALSE(entries[0].contains("parent"));
    CHECK(entries[1]["parent"] == path.str());
    CHECK(entries[0]["producer_tool"] == "grid");

    OwnedString filtered;
    REQUIRE(toolmem_store_list(store, "tika-", &filtered.text) == TOOLMEM_OK);
    CHECK(json::parse(filtered.str()).size() == 1);

    CHECK(toolmem_store_total_bytes(store) > 0);
    uint64_t dropped = 0;
    REQUIRE(toolmem_store_clear(store, &dropped) == TOOLMEM_OK);
    CHECK(dropped == 2);
    CHECK(toolmem_store_total_bytes(store) == 0);

    toolmem_store_free(store);
}

TEST_CASE("binary payloads round-trip through the C surface") {
    toolmem_store* store = toolmem_store_new(0);
    REQUIRE(store != nullptr);
    const std::vector<uint8_t> payload = {0x00, 0x01, 0xfe, 0xff, 'A'};

    OwnedString path;
    REQUIRE(toolmem_store_put_binary(store, "blob", payload.data(), payload.size(),
                                     &path.text) == TOOLMEM_OK);

    uint8_t* data = nullptr;
    size_t size = 0;
    REQUIRE(toolmem_store_get_binary(store, path.text, &data, &size) == TOOLMEM_OK);
    REQUIRE(size == payload.size());
    CHECK(std::memcmp(data, payload.data(), size) == 0);
    toolmem_buffer_free(data);

    // Base64 when asked for JSON, base64 when rendered.
    OwnedString as_json;
    REQUIRE(toolmem_store_get_json(store, path.text, &as_json.text) == TOOLMEM_OK);
    OwnedString rendered;
    REQUIRE(toolmem_store_render(store, path.text, &rendered.text) == TOOLMEM_OK);
    CHECK(json::parse(as_json.str()).get<std::string>() == rendered.str());

    // Asking for binary bytes of a non-binary value is a type error.
    OwnedString text_path;
    REQUIRE(toolmem_store_put_text(store, "t", "not binary", &text_path.text) == TOOLMEM_OK);
    CHECK(toolmem_store_get_binary(store, text_path.text, &data, &size) ==
          TOOLMEM_E_INVALID_VALUE);

    toolmem_store_free(store);
}

TEST_CASE("failures set a readable thread-local error") {
    toolmem_store* store = toolmem_store_new(0);
    REQUIRE(store != nullptr);

    OwnedString out;
    CHECK(toolmem_store_put_json(store, "bad name", "1", &out.text) ==
          TOOLMEM_E_INVALID_TOOL_NAME);
    CHECK(std::string(toolmem_last_error()).find("bad name") != std::string::npos);
    CHECK(out.text == nullptr);  // out-params untouched on failure

    CHECK(toolmem_store_put_json(store, "tool", "{not json", &out.text) == TOOLMEM_E_PARSE);
    CHECK(toolmem_store_get_json(store, "ghost-00000000-0000-4000-8000-000000000000",
                                 &out.text) == TOOLMEM_E_NOT_FOUND);
    CHECK(toolmem_store_put_json(nullptr, "tool", "1", &out.text) == TOOLMEM_E_VALIDATION);
    CHECK(out.text == nullptr);

    toolmem_store_free(store);
}

TEST_CASE("capacity errors surface through the store API") {
    toolmem_store* store = toolmem_store_new(8);
    REQUIRE(store != nullptr);
    OwnedString path;
    CHECK(toolmem_store_put_text(store, "t", "tiny", &path.text) == TOOLMEM_OK);
    OwnedString second;
    CHECK(toolmem_store_put_text(store, "t", "this does not fit by any measure",
                                 &second.text) == TOOLMEM_E_CAPACITY_EXCEEDED);
    toolmem_store_free(store);
}

TEST_CASE("path parsing and argument resolution") {
    OwnedString parsed;
    REQUIRE(toolmem_path_parse(
                "extract_sds-3bec235a-8bb3-4e1f-b049-029c655f54f1/ingredients",
                &parsed.text) == TOOLMEM_OK);
    json path = json::parse(parsed.str());
    CHECK(path["tool_name"] == "extract_sds");
    CHECK(path["uuid"] == "3bec235a-8bb3-4e1f-b049-029c655f54f1");
    CHECK(path["subkey"] == "ingredients");

    OwnedString bad;
    CHECK(toolmem_path_parse("not a path", &bad.text) == TOOLMEM_E_PARSE);

    toolmem_store* store = toolmem_store_new(0);
    OwnedString stored;
    REQUIRE(toolmem_store_put_json(store, "t", R"({"k":42})", &stored.text) == TOOLMEM_OK);

    json args;
    args["direct"] = stored.str() + "/k";
    args["plain"] = "text";
    OwnedString resolved;
    REQUIRE(toolmem_resolve_arguments(store, args.dump().c_str(), &resolved.text) ==
            TOOLMEM_OK);
    json out = json::parse(resolved.str());
    CHECK(out["direct"] == 42);
    CHECK(out["plain"] == "text");

    args["direct"] = "ghost-00000000-0000-4000-8000-000000000000";
    CHECK(toolmem_resolve_arguments(store, args.dump().c_str(), &resolved.text) ==
          TOOLMEM_E_DANGLING_PATH);
    toolmem_store_free(store);
}

TEST_CASE("token counting matches the documented schemes") {
    uint64_t tokens = 0;
    REQUIRE(toolmem_count_tokens("bytes4", "abcde", &tokens) == TOOLMEM_OK);
    CHECK(tokens == 2);
    REQUIRE(toolmem_count_tokens("words", "two words", &tokens) == TOOLMEM_OK);
    CHECK(tokens == 2);
    CHECK(toolmem_count_tokens("tiktoken", "x", &tokens) == TOOLMEM_E_VALIDATION);
}

TEST_CASE("sessions expose the catalog, calls, store, and trace") {
    toolmem_session* session = toolmem_session_new("{}");
    REQUIRE(session != nullptr);
    REQUIRE(toolmem_session_seed_uuids(session, 3) == TOOLMEM_OK);

    OwnedString tools;
    REQUIRE(toolmem_session_list_tools(session, &tools.text) == TOOLMEM_OK);
    json catalog = json::parse(tools.str());
    REQUIRE(catalog.size() == 1);  // no upstreams: just the final-answer tool
    CHECK(catalog[0]["name"] == "retrieve_final_answer_from_memory");

    // Seed a value by hand and retrieve it through the built-in tool.
    toolmem_store* store = toolmem_session_store(session);
    REQUIRE(store != nullptr);
    OwnedString path;
    REQUIRE(toolmem_store_put_json(store, "tool", R"({"answer":"forty-two"})", &path.text) ==
            TOOLMEM_OK);

    json args;
    args["memory_path"] = path.str() + "/answer";
    OwnedString result;
    REQUIRE(toolmem_session_call_tool(session, "retrieve_final_answer_from_memory",
                                      args.dump().c_str(), &result.text) == TOOLMEM_OK);
    json call = json::parse(result.str());
    CHECK(call["text"] == "forty-two");
    CHECK(call["stored"] == false);
    CHECK_FALSE(call.contains("stored_path"));

    OwnedString unknown;
    CHECK(toolmem_session_call_tool(session, "nope", "{}", &unknown.text) ==
          TOOLMEM_E_UNKNOWN_TOOL);

    OwnedString trace;
    REQUIRE(toolmem_session_trace_json(session, &trace.text) == TOOLMEM_OK);
    json parsed_trace = json::parse(trace.str());
    REQUIRE(parsed_trace["records"].size() == 1);
    CHECK(parsed_trace["records"][0]["tool_name"] == "retrieve_final_answer_from_memory");
    CHECK(parsed_trace["records"][0]["tokens_actual"].get<int>() > 0);

    // The store handle is borrowed; freeing it must not break the session.
    toolmem_store_free(store);
    OwnedString still;
    REQUIRE(toolmem_session_trace_json(session, &still.text) == TOOLMEM_OK);

    toolmem_session_free(session);
}

TEST_CASE("session config errors and bad specs are reported") {
    toolmem_session* bad = toolmem_session_new(R"({"bogus_key": 1})");
    CHECK(bad == nullptr);
    CHECK(std::string(toolmem_last_error()).find("bogus_key") != std::string::npos);

    toolmem_session* session = toolmem_session_new(nullptr);  // NULL means defaults
    REQUIRE(session != nullptr);
    CHECK(toolmem_session_connect_upstream(session, "") == TOOLMEM_E_VALIDATION);
    CHECK(toolmem_session_connect_upstream(session, "tcp:127.0.0.1:1") ==
          TOOLMEM_E_TRANSPORT);
    toolmem_session_free(session);
}

TEST_CASE("fixed uuid lists drive the next stored paths") {
    toolmem_session* session = toolmem_session_new("{}");
    REQUIRE(session != nullptr);
    const char* uuids[] = {"fcb87ffa-31b7-41b0-bf90-76d0c87000f5"};
    REQUIRE(toolmem_session_fixed_uuids(session, uuids, 1) == TOOLMEM_OK);

    toolmem_store* store = toolmem_session_store(session);
    OwnedString path;
    REQUIRE(toolmem_store_put_text(store, "seeded", "x", &path.text) == TOOLMEM_OK);
    CHECK(path.str() == "seeded-fcb87ffa-31b7-41b0-bf90-76d0c87000f5");
    toolmem_session_free(session);
}

TEST_CASE("experiments run through the shared library") {
    json config;
    config["experiment"] = "sds";
    config["mode"] = "mirrored";
    config["threshold_bytes"] = 128;
    config["fixture_dir"] = kFixtures;
    config["uuid_seed"] = 1;

    OwnedString out;
    REQUIRE(toolmem_run_experiment(config.dump().c_str(), &out.text) == TOOLMEM_OK);
    json result = json::parse(out.str());
    CHECK(result["report"]["completed"] == true);
    CHECK(result["trace"]["records"].size() == 4);
    CHECK(result["config"]["experiment"] == "sds");

    // Overflow is a reported outcome, not an API failure.
    config["experiment"] = "grid";
    config["mode"] = "conventional";
    config["grid_dim"] = 12;
    config["context_limit_tokens"] = 500;
    OwnedString overflowed;
    REQUIRE(toolmem_run_experiment(config.dump().c_str(), &overflowed.text) == TOOLMEM_OK);
    json failed = json::parse(overflowed.str());
    CHECK(failed["report"]["completed"] == false);
    CHECK(failed["report"]["failure_reason"] == "ContextOverflow");

    OwnedString bad;
    CHECK(toolmem_run_experiment(R"({"experiment": "protein"})", &bad.text) ==
          TOOLMEM_E_VALIDATION);
    CHECK(toolmem_run_experiment("{nope", &bad.text) == TOOLMEM_E_PARSE);
}

TEST_CASE("config files load and normalize through the C API") {
    std::string path = "/tmp/toolmem_config_" + std::to_string(::getpid()) + ".json";
    {
        FILE* f = std::fopen(path.c_str(), "w");
        REQUIRE(f != nullptr);
        std::fputs(R"({"counter": "words", "mirror": {"threshold_bytes": 64}})", f);
        std::fclose(f);
    }
    OwnedString out;
    REQUIRE(toolmem_load_config(path.c_str(), &out.text) == TOOLMEM_OK);
    json normalized = json::parse(out.str());
    CHECK(normalized["counter"] == "words");
    CHECK(normalized["mirror"]["threshold_bytes"] == 64);
    CHECK(normalized["mirror"]["name_suffix"] == "_mirrored");
    CHECK(normalized["context_limit_tokens"] == 1000000);
    std::remove(path.c_str());

    OwnedString missing;
    CHECK(toolmem_load_config("/no/such/file.json", &missing.text) ==
          TOOLMEM_E_FILE_NOT_FOUND);
}
