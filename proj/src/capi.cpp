#include "toolmem/toolmem.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "error.hpp"
#include "experiment.hpp"
#include "jsonrpc.hpp"
#include "ledger.hpp"
#include "mirror.hpp"
#include "path.hpp"
#include "proxy.hpp"
#include "store.hpp"
#include "uuid.hpp"
#include "value.hpp"
#include "harness_tools.hpp"

using toolmem::Error;
using toolmem::ErrorCode;
using toolmem::Value;

namespace {

thread_local std::string t_last_error;

toolmem_status status_from(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return TOOLMEM_E_NOT_FOUND;
        case ErrorCode::dangling_path: return TOOLMEM_E_DANGLING_PATH;
        case ErrorCode::capacity_exceeded: return TOOLMEM_E_CAPACITY_EXCEEDED;
        case ErrorCode::invalid_tool_name: return TOOLMEM_E_INVALID_TOOL_NAME;
        case ErrorCode::invalid_value: return TOOLMEM_E_INVALID_VALUE;
        case ErrorCode::name_collision: return TOOLMEM_E_NAME_COLLISION;
        case ErrorCode::unknown_tool: return TOOLMEM_E_UNKNOWN_TOOL;
        case ErrorCode::tool_execution: return TOOLMEM_E_TOOL_EXECUTION;
        case ErrorCode::protocol: return TOOLMEM_E_PROTOCOL;
        case ErrorCode::transport: return TOOLMEM_E_TRANSPORT;
        case ErrorCode::shape_mismatch: return TOOLMEM_E_SHAPE_MISMATCH;
        case ErrorCode::file_not_found: return TOOLMEM_E_FILE_NOT_FOUND;
        case ErrorCode::malformed_document: return TOOLMEM_E_MALFORMED_DOCUMENT;
        case ErrorCode::context_overflow: return TOOLMEM_E_CONTEXT_OVERFLOW;
        case ErrorCode::parse: return TOOLMEM_E_PARSE;
        case ErrorCode::validation: return TOOLMEM_E_VALIDATION;
    }
    return TOOLMEM_E_OTHER;
}

char* dup_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, text.data(), text.size());
    out[text.size()] = '\0';
    return out;
}

Value parse_json_arg(const char* text, const char* what) {
    try {
        return Value::parse(text);
    } catch (const nlohmann::json::parse_error& error) {
        throw Error(ErrorCode::parse, std::string(what) + ": " + error.what());
    }
}

void require_arg(const void* pointer, const char* name) {
    if (pointer == nullptr) {
        throw Error(ErrorCode::validation, std::string(name) + " must not be NULL");
    }
}

template <typename Fn>
toolmem_status guarded(Fn&& fn) {
    try {
        fn();
        return TOOLMEM_OK;
    } catch (const Error& error) {
        t_last_error = error.what();
        return status_from(error.code());
    } catch (const std::exception& error) {
        t_last_error = error.what();
        return TOOLMEM_E_OTHER;
    }
}

std::unique_ptr<toolmem::ProxySession> make_session(const toolmem::AppConfig& config) {
    auto session = std::make_unique<toolmem::ProxySession>(
        config.mirror, toolmem::make_counter(config.counter_id), config.store_capacity_bytes);
    for (const std::string& spec : config.endpoints) {
        session->connect_upstream(toolmem::UpstreamEndpoint::parse_spec(spec));
    }
    return session;
}

std::vector<toolmem::CallableTool> harness_toolset(const std::string& experiment,
                                                   const toolmem::ExperimentConfig& config) {
    if (experiment == "grid") {
        toolmem::harness::GridConfig grid{config.grid_dim};
        auto corpus = toolmem::harness::SimilarityCorpus::load(
            config.fixture_dir + "/corpus.json", config.top_k);
        return toolmem::harness::grid_toolset(grid, corpus);
    }
    if (experiment == "sds") {
        toolmem::harness::DocumentRoot root;
        root.directory = config.fixture_dir + "/sds";
        root.aliases["sds.pdf"] = config.fixture_dir + "/sds/titanium.txt";
        return toolmem::harness::sds_toolset(root);
    }
    throw Error(ErrorCode::validation,
                "unknown experiment '" + experiment + "' (expected grid or sds)");
}

}  // namespace

struct toolmem_store {
    toolmem::SessionStore* impl;
    bool owns;
};

struct toolmem_session {
    explicit toolmem_session(std::unique_ptr<toolmem::ProxySession> owned)
        : impl(std::move(owned)), store_view{&impl->store(), false} {}

    std::unique_ptr<toolmem::ProxySession> impl;
    toolmem_store store_view;
};

extern "C" {

const char* toolmem_version(void) { return "1.0.0"; }

const char* toolmem_status_name(toolmem_status status) {
    switch (status) {
        case TOOLMEM_OK: return "OK";
        case TOOLMEM_E_NOT_FOUND: return "NotFound";
        case TOOLMEM_E_DANGLING_PATH: return "DanglingPath";
        case TOOLMEM_E_CAPACITY_EXCEEDED: return "CapacityExceeded";
        case TOOLMEM_E_INVALID_TOOL_NAME: return "InvalidToolName";
        case TOOLMEM_E_INVALID_VALUE: return "InvalidValue";
        case TOOLMEM_E_NAME_COLLISION: return "NameCollision";
        case TOOLMEM_E_UNKNOWN_TOOL: return "UnknownTool";
        case TOOLMEM_E_TOOL_EXECUTION: return "ToolExecutionError";
        case TOOLMEM_E_PROTOCOL: return "ProtocolError";
        case TOOLMEM_E_TRANSPORT: return "TransportError";
        case TOOLMEM_E_SHAPE_MISMATCH: return "ShapeMismatch";
        case TOOLMEM_E_FILE_NOT_FOUND: return "FileNotFound";
        case TOOLMEM_E_MALFORMED_DOCUMENT: return "MalformedDocument";
        case TOOLMEM_E_CONTEXT_OVERFLOW: return "ContextOverflow";
        case TOOLMEM_E_PARSE: return "ParseError";
        case TOOLMEM_E_VALIDATION: return "ValidationError";
        case TOOLMEM_E_OTHER: return "Error";
    }
    return "Error";
}

const char* toolmem_last_error(void) { return t_last_error.c_str(); }

void toolmem_string_free(char* text) { std::free(text); }

void toolmem_buffer_free(uint8_t* data) { std::free(data); }

const char* toolmem_path_grammar(void) { return toolmem::kPathGrammarPattern; }

/* ------------------------------------------------------------------ */

toolmem_store* toolmem_store_new(uint64_t capacity_bytes) {
    try {
        std::optional<std::uint64_t> capacity;
        if (capacity_bytes > 0) capacity = capacity_bytes;
        return new toolmem_store{new toolmem::SessionStore(capacity), true};
    } catch (const std::exception& error) {
        t_last_error = error.what();
        return nullptr;
    }
}

void toolmem_store_free(toolmem_store* store) {
    if (store == nullptr || !store->owns) return;
    delete store->impl;
    delete store;
}

toolmem_status toolmem_store_seed_uuids(toolmem_store* store, uint64_t seed) {
    return guarded([&] {
        require_arg(store, "store");
        store->impl->set_uuid_source(toolmem::seeded_uuid_source(seed));
    });
}

toolmem_status toolmem_store_put_json(toolmem_store* store, const char* tool,
                                      const char* value_json, char** out_path) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(tool, "tool");
        require_arg(value_json, "value_json");
        require_arg(out_path, "out_path");
        const std::string path =
            store->impl->put(tool, parse_json_arg(value_json, "value_json"));
        *out_path = dup_string(path);
    });
}

toolmem_status toolmem_store_put_text(toolmem_store* store, const char* tool,
                                      const char* text, char** out_path) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(tool, "tool");
        require_arg(text, "text");
        require_arg(out_path, "out_path");
        *out_path = dup_string(store->impl->put(tool, Value(std::string(text))));
    });
}

toolmem_status toolmem_store_put_binary(toolmem_store* store, const char* tool,
                                        const uint8_t* data, size_t size, char** out_path) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(tool, "tool");
        require_arg(out_path, "out_path");
        if (size > 0) require_arg(data, "data");
        std::vector<std::uint8_t> bytes;
        if (size > 0) bytes.assign(data, data + size);
        *out_path = dup_string(store->impl->put(tool, Value::binary(std::move(bytes))));
    });
}

toolmem_status toolmem_store_get_json(const toolmem_store* store, const char* path,
                                      char** out_json) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(path, "path");
        require_arg(out_json, "out_json");
        const auto value = store->impl->get(path);
        if (value->is_binary()) {
            const auto& bytes = value->get_binary();
            *out_json = dup_string(Value(toolmem::base64_encode(bytes.data(), bytes.size())).dump());
        } else {
            *out_json = dup_string(value->dump());
        }
    });
}

toolmem_status toolmem_store_render(const toolmem_store* store, const char* path,
                                    char** out_text) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(path, "path");
        require_arg(out_text, "out_text");
        *out_text = dup_string(toolmem::render_value(*store->impl->get(path)));
    });
}

toolmem_status toolmem_store_get_binary(const toolmem_store* store, const char* path,
                                        uint8_t** out_data, size_t* out_size) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(path, "path");
        require_arg(out_data, "out_data");
        require_arg(out_size, "out_size");
        const auto value = store->impl->get(path);
        if (!value->is_binary()) {
            throw Error(ErrorCode::invalid_value,
                        "value at '" + std::string(path) + "' is not binary");
        }
        const auto& bytes = value->get_binary();
        auto* buffer = static_cast<uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
        if (buffer == nullptr) throw std::bad_alloc();
        std::memcpy(buffer, bytes.data(), bytes.size());
        *out_data = buffer;
        *out_size = bytes.size();
    });
}

int toolmem_store_contains(const toolmem_store* store, const char* path) {
    if (store == nullptr || path == nullptr) return 0;
    return store->impl->contains(path) ? 1 : 0;
}

toolmem_status toolmem_store_list(const toolmem_store* store, const char* prefix,
                                  char** out_json) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(out_json, "out_json");
        std::optional<std::string> wanted;
        if (prefix != nullptr) wanted = std::string(prefix);
        Value out = Value::array();
        for (const auto& info : store->impl->list_entries(wanted)) {
            Value entry;
            entry["path"] = info.path;
            entry["kind"] = toolmem::kind_name(info.kind);
            entry["byte_size"] = info.byte_size;
            entry["producer_tool"] = info.producer_tool;
            if (info.parent) entry["parent"] = *info.parent;
            out.push_back(std::move(entry));
        }
        *out_json = dup_string(out.dump());
    });
}

toolmem_status toolmem_store_clear(toolmem_store* store, uint64_t* out_dropped) {
    return guarded([&] {
        require_arg(store, "store");
        const std::size_t dropped = store->impl->clear();
        if (out_dropped != nullptr) *out_dropped = dropped;
    });
}

uint64_t toolmem_store_total_bytes(const toolmem_store* store) {
    if (store == nullptr) return 0;
    return store->impl->total_bytes();
}

/* ------------------------------------------------------------------ */

toolmem_status toolmem_path_parse(const char* text, char** out_json) {
    return guarded([&] {
        require_arg(text, "text");
        require_arg(out_json, "out_json");
        const auto parsed = toolmem::parse(text);
        if (!parsed.has_value()) {
            throw Error(ErrorCode::parse,
                        "'" + std::string(text) + "' does not match the memory path grammar");
        }
        Value out;
        out["tool_name"] = parsed->tool_name;
        out["uuid"] = parsed->uuid;
        if (parsed->subkey) out["subkey"] = *parsed->subkey;
        *out_json = dup_string(out.dump());
    });
}

toolmem_status toolmem_resolve_arguments(const toolmem_store* store, const char* args_json,
                                         char** out_json) {
    return guarded([&] {
        require_arg(store, "store");
        require_arg(args_json, "args_json");
        require_arg(out_json, "out_json");
        const Value resolved = toolmem::resolve_arguments(
            parse_json_arg(args_json, "args_json"), *store->impl);
        *out_json = dup_string(resolved.dump());
    });
}

toolmem_status toolmem_count_tokens(const char* counter_id, const char* text,
                                    uint64_t* out_tokens) {
    return guarded([&] {
        require_arg(counter_id, "counter_id");
        require_arg(text, "text");
        require_arg(out_tokens, "out_tokens");
        *out_tokens = toolmem::make_counter(counter_id).count(text);
    });
}

/* ------------------------------------------------------------------ */

toolmem_session* toolmem_session_new(const char* config_json) {
    try {
        const toolmem::AppConfig config =
            toolmem::load_config_text(config_json == nullptr ? "" : config_json);
        return new toolmem_session(make_session(config));
    } catch (const std::exception& error) {
        t_last_error = error.what();
        return nullptr;
    }
}

void toolmem_session_free(toolmem_session* session) { delete session; }

toolmem_status toolmem_session_seed_uuids(toolmem_session* session, uint64_t seed) {
    return guarded([&] {
        require_arg(session, "session");
        session->impl->store().set_uuid_source(toolmem::seeded_uuid_source(seed));
    });
}

toolmem_status toolmem_session_fixed_uuids(toolmem_session* session,
                                           const char* const* uuids, size_t count) {
    return guarded([&] {
        require_arg(session, "session");
        if (count > 0) require_arg(uuids, "uuids");
        std::vector<std::string> fixed;
        fixed.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            require_arg(uuids[i], "uuids[i]");
            fixed.emplace_back(uuids[i]);
        }
        session->impl->store().set_uuid_source(
            toolmem::fixed_uuid_source(std::move(fixed), toolmem::seeded_uuid_source(0)));
    });
}

toolmem_status toolmem_session_connect_upstream(toolmem_session* session, const char* spec) {
    return guarded([&] {
        require_arg(session, "session");
        require_arg(spec, "spec");
        session->impl->connect_upstream(toolmem::UpstreamEndpoint::parse_spec(spec));
    });
}

toolmem_status toolmem_session_list_tools(const toolmem_session* session, char** out_json) {
    return guarded([&] {
        require_arg(session, "session");
        require_arg(out_json, "out_json");
        Value out = Value::array();
        for (const auto& descriptor : session->impl->list_tools()) {
            out.push_back(toolmem::descriptor_to_json(descriptor));
        }
        *out_json = dup_string(out.dump());
    });
}

toolmem_status toolmem_session_call_tool(toolmem_session* session, const char* name,
                                         const char* args_json, char** out_json) {
    return guarded([&] {
        require_arg(session, "session");
        require_arg(name, "name");
        require_arg(out_json, "out_json");
        const Value args = args_json == nullptr
                               ? Value::object()
                               : parse_json_arg(args_json, "args_json");
        const toolmem::ToolResult result = session->impl->call_tool(name, args);
        Value out;
        out["text"] = result.rendered_text();
        out["stored"] = result.stored();
        if (result.instruction.has_value()) {
            out["stored_path"] = toolmem::render(result.instruction->base_path);
        }
        *out_json = dup_string(out.dump());
    });
}

toolmem_store* toolmem_session_store(toolmem_session* session) {
    if (session == nullptr) return nullptr;
    return &session->store_view;
}

toolmem_status toolmem_session_trace_json(const toolmem_session* session, char** out_json) {
    return guarded([&] {
        require_arg(session, "session");
        require_arg(out_json, "out_json");
        *out_json = dup_string(toolmem::trace_json(session->impl->snapshot_trace()).dump());
    });
}

toolmem_status toolmem_session_serve_stdio(toolmem_session* session) {
    return guarded([&] {
        require_arg(session, "session");
        toolmem::LineTransport transport(0, 1, /*own_fds=*/false);
        toolmem::serve_session(transport, *session->impl);
    });
}

toolmem_status toolmem_serve_tcp(const char* config_json, int port, int max_connections,
                                 int* out_bound_port) {
    return guarded([&] {
        const toolmem::AppConfig config =
            toolmem::load_config_text(config_json == nullptr ? "" : config_json);
        toolmem::TcpListener listener(port);
        if (out_bound_port != nullptr) *out_bound_port = listener.port();
        std::vector<std::thread> workers;
        int accepted = 0;
        while (max_connections == 0 || accepted < max_connections) {
            auto transport = listener.accept();
            ++accepted;
            workers.emplace_back(
                [config, connection = std::shared_ptr<toolmem::LineTransport>(
                             std::move(transport))]() mutable {
                    try {
                        auto session = make_session(config);
                        toolmem::serve_session(*connection, *session);
                    } catch (const std::exception&) {
                        // Connection-scoped failure; the listener keeps going.
                    }
                });
        }
        for (std::thread& worker : workers) worker.join();
    });
}

/* ------------------------------------------------------------------ */

toolmem_status toolmem_run_experiment(const char* config_json, char** out_json) {
    return guarded([&] {
        require_arg(config_json, "config_json");
        require_arg(out_json, "out_json");
        const auto config = toolmem::ExperimentConfig::from_json(
            parse_json_arg(config_json, "config_json"));
        const auto result = toolmem::run_experiment(config);
        *out_json = dup_string(toolmem::experiment_report_json(config, result).dump());
    });
}

toolmem_status toolmem_harness_serve_stdio(const char* experiment, const char* config_json) {
    return guarded([&] {
        require_arg(experiment, "experiment");
        Value config_value = config_json == nullptr
                                 ? Value::object()
                                 : parse_json_arg(config_json, "config_json");
        auto config = toolmem::ExperimentConfig::from_json(config_value);
        const auto toolset = harness_toolset(experiment, config);
        toolmem::LineTransport transport(0, 1, /*own_fds=*/false);
        toolmem::serve_plain_tools(transport, toolset, "toolmem-harness");
    });
}

toolmem_status toolmem_load_config(const char* path, char** out_json) {
    return guarded([&] {
        require_arg(path, "path");
        require_arg(out_json, "out_json");
        *out_json = dup_string(toolmem::dump_config(toolmem::load_config(path)).dump());
    });
}

}  // extern "C"
