// toolmem command-line front end. Everything below talks to the shared
// library exclusively through the public C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "toolmem/toolmem.h"

namespace {

using Json = nlohmann::json;

struct OwnedString {
    char* text = nullptr;
    ~OwnedString() { toolmem_string_free(text); }
    const char* get() const { return text; }
};

int fail(const std::string& message) {
    std::cerr << "toolmem: error: " << message << "\n";
    return 1;
}

int fail_status(toolmem_status status) {
    return fail(std::string(toolmem_status_name(status)) + ": " + toolmem_last_error());
}

struct SessionHandle {
    toolmem_session* session = nullptr;
    ~SessionHandle() { toolmem_session_free(session); }
};

struct StoreHandle {
    toolmem_store* store = nullptr;
    ~StoreHandle() { toolmem_store_free(store); }
};

// ---------------------------------------------------------------- serve --

struct ServeArgs {
    std::vector<std::string> upstreams;
    std::string config_path;
    int listen_port = -1;  // -1: stdio
    int max_connections = 0;
    std::optional<std::uint64_t> uuid_seed;
};

std::optional<Json> merged_config(const std::string& config_path,
                                  const std::vector<std::string>& upstreams,
                                  std::string& error) {
    Json config = Json::object();
    if (!config_path.empty()) {
        OwnedString normalized;
        const toolmem_status status = toolmem_load_config(config_path.c_str(), &normalized.text);
        if (status != TOOLMEM_OK) {
            error = std::string(toolmem_status_name(status)) + ": " + toolmem_last_error();
            return std::nullopt;
        }
        config = Json::parse(normalized.get());
    }
    if (!upstreams.empty()) {
        if (!config.contains("endpoints")) config["endpoints"] = Json::array();
        for (const std::string& spec : upstreams) config["endpoints"].push_back(spec);
    }
    return config;
}

int run_serve(const ServeArgs& args) {
    std::string error;
    const auto config = merged_config(args.config_path, args.upstreams, error);
    if (!config.has_value()) return fail(error);
    const std::string config_text = config->dump();

    if (args.listen_port >= 0) {
        const toolmem_status status = toolmem_serve_tcp(
            config_text.c_str(), args.listen_port, args.max_connections, nullptr);
        if (status != TOOLMEM_OK) return fail_status(status);
        return 0;
    }

    SessionHandle handle;
    handle.session = toolmem_session_new(config_text.c_str());
    if (handle.session == nullptr) return fail(toolmem_last_error());
    if (args.uuid_seed.has_value()) {
        const toolmem_status status =
            toolmem_session_seed_uuids(handle.session, *args.uuid_seed);
        if (status != TOOLMEM_OK) return fail_status(status);
    }
    const toolmem_status status = toolmem_session_serve_stdio(handle.session);
    if (status != TOOLMEM_OK) return fail_status(status);
    return 0;
}

// ------------------------------------------------------- run-experiment --

struct ExperimentArgs {
    std::string experiment;
    std::string mode = "mirrored";
    int runs = 1;
    std::optional<std::uint64_t> uuid_seed;
    bool golden_uuids = false;
    int grid_dim = 128;
    int top_k = 10;
    std::uint64_t threshold_bytes = 128;
    std::uint64_t context_limit_tokens = 1'000'000;
    std::string counter = "bytes4";
    std::string fixture_dir = "fixtures";
    std::string out_path;
};

int run_experiment_cmd(const ExperimentArgs& args) {
    Json config;
    config["experiment"] = args.experiment;
    config["mode"] = args.mode;
    config["grid_dim"] = args.grid_dim;
    config["top_k"] = args.top_k;
    config["threshold_bytes"] = args.threshold_bytes;
    config["context_limit_tokens"] = args.context_limit_tokens;
    config["counter"] = args.counter;
    config["fixture_dir"] = args.fixture_dir;
    config["golden_uuids"] = args.golden_uuids;
    if (args.uuid_seed.has_value()) config["uuid_seed"] = *args.uuid_seed;
    const std::string config_text = config.dump();

    Json runs = Json::array();
    std::string failure;
    for (int i = 0; i < args.runs; ++i) {
        OwnedString report;
        const toolmem_status status = toolmem_run_experiment(config_text.c_str(), &report.text);
        if (status != TOOLMEM_OK) return fail_status(status);
        Json document = Json::parse(report.get());
        if (failure.empty() && !document["report"].value("completed", true)) {
            failure = document["report"].value("failure_reason", "run failed");
            if (document["report"].contains("failing_tool")) {
                failure += " at tool " +
                           document["report"]["failing_tool"].get<std::string>();
            }
        }
        runs.push_back(std::move(document));
    }

    Json output;
    if (args.runs == 1) {
        output = runs[0];
    } else {
        double mean_actual = 0.0;
        double mean_counterfactual = 0.0;
        double mean_wall = 0.0;
        for (const Json& run : runs) {
            mean_actual += run["report"]["total_tokens_actual"].get<double>();
            mean_counterfactual += run["report"]["total_tokens_counterfactual"].get<double>();
            mean_wall += run["report"]["wall_time_seconds"].get<double>();
        }
        const double n = static_cast<double>(args.runs);
        output["runs"] = std::move(runs);
        output["mean_total_tokens_actual"] = mean_actual / n;
        output["mean_total_tokens_counterfactual"] = mean_counterfactual / n;
        output["mean_wall_time_seconds"] = mean_wall / n;
    }

    const std::string rendered = output.dump(2);
    if (args.out_path.empty()) {
        std::cout << rendered << "\n";
    } else {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out) return fail("cannot write report to '" + args.out_path + "'");
        out << rendered << "\n";
    }

    if (!failure.empty()) return fail(failure);
    return 0;
}

// ------------------------------------------------------------------ mem --

struct MemArgs {
    std::vector<std::string> puts;  // tool=JSON
    std::optional<std::uint64_t> uuid_seed;
    std::uint64_t capacity_bytes = 0;
    std::string prefix;
    std::string get_path;
};

int prepare_store(const MemArgs& args, StoreHandle& handle) {
    handle.store = toolmem_store_new(args.capacity_bytes);
    if (handle.store == nullptr) return fail(toolmem_last_error());
    if (args.uuid_seed.has_value()) {
        const toolmem_status status = toolmem_store_seed_uuids(handle.store, *args.uuid_seed);
        if (status != TOOLMEM_OK) return fail_status(status);
    }
    for (const std::string& spec : args.puts) {
        const auto equals = spec.find('=');
        if (equals == std::string::npos || equals == 0) {
            return fail("--put expects tool=JSON, got '" + spec + "'");
        }
        const std::string tool = spec.substr(0, equals);
        const std::string value = spec.substr(equals + 1);
        OwnedString path;
        const toolmem_status status =
            toolmem_store_put_json(handle.store, tool.c_str(), value.c_str(), &path.text);
        if (status != TOOLMEM_OK) return fail_status(status);
    }
    return 0;
}

int run_mem_ls(const MemArgs& args) {
    StoreHandle handle;
    if (const int code = prepare_store(args, handle); code != 0) return code;
    OwnedString listing;
    const toolmem_status status = toolmem_store_list(
        handle.store, args.prefix.empty() ? nullptr : args.prefix.c_str(), &listing.text);
    if (status != TOOLMEM_OK) return fail_status(status);
    for (const Json& entry : Json::parse(listing.get())) {
        std::cout << entry["path"].get<std::string>() << "\t"
                  << entry["kind"].get<std::string>() << "\t"
                  << entry["byte_size"].get<std::uint64_t>() << "\t"
                  << entry["producer_tool"].get<std::string>() << "\n";
    }
    return 0;
}

int run_mem_get(const MemArgs& args) {
    StoreHandle handle;
    if (const int code = prepare_store(args, handle); code != 0) return code;
    OwnedString text;
    const toolmem_status status =
        toolmem_store_render(handle.store, args.get_path.c_str(), &text.text);
    if (status != TOOLMEM_OK) return fail_status(status);
    std::cout << text.get() << "\n";
    return 0;
}

int run_mem_clear(const MemArgs& args) {
    StoreHandle handle;
    if (const int code = prepare_store(args, handle); code != 0) return code;
    std::uint64_t dropped = 0;
    const toolmem_status status = toolmem_store_clear(handle.store, &dropped);
    if (status != TOOLMEM_OK) return fail_status(status);
    std::cout << dropped << "\n";
    return 0;
}

// ------------------------------------------------------- harness-server --

struct HarnessArgs {
    std::string experiment;
    int grid_dim = 128;
    int top_k = 10;
    std::string fixture_dir = "fixtures";
};

int run_harness_server(const HarnessArgs& args) {
    Json config;
    config["experiment"] = args.experiment;
    config["grid_dim"] = args.grid_dim;
    config["top_k"] = args.top_k;
    config["fixture_dir"] = args.fixture_dir;
    const std::string config_text = config.dump();
    const toolmem_status status =
        toolmem_harness_serve_stdio(args.experiment.c_str(), config_text.c_str());
    if (status != TOOLMEM_OK) return fail_status(status);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tool-response virtualization proxy for LLM agent pipelines"};
    app.set_version_flag("--version", toolmem_version());
    app.require_subcommand(1);

    ServeArgs serve_args;
    CLI::App* serve = app.add_subcommand(
        "serve", "Serve the mirrored tool catalog over stdio (default) or TCP");
    serve->add_option("--upstream", serve_args.upstreams,
                      "Upstream tool server: a command line or tcp:host:port (repeatable)");
    serve->add_option("--config", serve_args.config_path, "Application config file (JSON)");
    serve->add_option("--listen", serve_args.listen_port,
                      "TCP port to listen on (0 picks one); omit for stdio");
    serve->add_option("--max-connections", serve_args.max_connections,
                      "Stop after this many TCP connections close (0 = serve forever)");
    serve->add_option("--uuid-seed", serve_args.uuid_seed,
                      "Deterministic memory-path UUIDs (stdio serve only)");

    ExperimentArgs experiment_args;
    CLI::App* experiment = app.add_subcommand(
        "run-experiment", "Replay a tool workflow and report token accounting");
    experiment->add_option("experiment", experiment_args.experiment, "grid or sds")
        ->required()
        ->check(CLI::IsMember({"grid", "sds"}));
    experiment->add_option("--mode", experiment_args.mode, "conventional or mirrored")
        ->check(CLI::IsMember({"conventional", "mirrored"}));
    experiment->add_option("--runs", experiment_args.runs, "Repeat count")
        ->check(CLI::PositiveNumber);
    experiment->add_option("--seed", experiment_args.uuid_seed, "Deterministic UUID seed");
    experiment->add_flag("--golden-uuids", experiment_args.golden_uuids,
                         "Use the documented fixed UUID sequence for this experiment");
    experiment->add_option("--grid-dim", experiment_args.grid_dim,
                           "Synthetic grid dimension (grid is dim^3 elements)");
    experiment->add_option("--top-k", experiment_args.top_k, "Similar molecules to return");
    experiment->add_option("--threshold-bytes", experiment_args.threshold_bytes,
                           "Store outputs whose serialized size exceeds this");
    experiment->add_option("--context-limit", experiment_args.context_limit_tokens,
                           "Context window budget in tokens");
    experiment->add_option("--counter", experiment_args.counter,
                           "Token counter scheme (bytes4 or words)");
    experiment->add_option("--fixtures", experiment_args.fixture_dir,
                           "Directory holding corpus.json and sds/");
    experiment->add_option("--out", experiment_args.out_path,
                           "Write the JSON report here instead of stdout");

    MemArgs mem_args;
    CLI::App* mem = app.add_subcommand("mem", "Inspect a session store");
    mem->require_subcommand(1);
    auto add_common_mem = [&mem_args](CLI::App* cmd) {
        cmd->add_option("--put", mem_args.puts,
                        "Seed the store with tool=JSON before the action (repeatable)");
        cmd->add_option("--uuid-seed", mem_args.uuid_seed, "Deterministic memory-path UUIDs");
        cmd->add_option("--capacity", mem_args.capacity_bytes,
                        "Store capacity in bytes (0 = unlimited)");
    };
    CLI::App* mem_ls = mem->add_subcommand("ls", "List entries (path, kind, bytes, tool)");
    add_common_mem(mem_ls);
    mem_ls->add_option("--prefix", mem_args.prefix, "Only paths with this prefix");
    CLI::App* mem_get = mem->add_subcommand("get", "Print the rendered value at a path");
    add_common_mem(mem_get);
    mem_get->add_option("path", mem_args.get_path, "Memory path")->required();
    CLI::App* mem_clear = mem->add_subcommand("clear", "Empty the store; print entries dropped");
    add_common_mem(mem_clear);

    HarnessArgs harness_args;
    CLI::App* harness = app.add_subcommand(
        "harness-server", "Serve an experiment's original tools over stdio");
    harness->add_option("experiment", harness_args.experiment, "grid or sds")
        ->required()
        ->check(CLI::IsMember({"grid", "sds"}));
    harness->add_option("--grid-dim", harness_args.grid_dim, "Synthetic grid dimension");
    harness->add_option("--top-k", harness_args.top_k, "Similar molecules to return");
    harness->add_option("--fixtures", harness_args.fixture_dir,
                        "Directory holding corpus.json and sds/");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForVersion& version) {
        return app.exit(version);
    } catch (const CLI::ParseError& parse_error) {
        app.exit(parse_error);
        return 2;
    }

    if (serve->parsed()) return run_serve(serve_args);
    if (experiment->parsed()) return run_experiment_cmd(experiment_args);
    if (mem->parsed()) {
        if (mem_ls->parsed()) return run_mem_ls(mem_args);
        if (mem_get->parsed()) return run_mem_get(mem_args);
        return run_mem_clear(mem_args);
    }
    return run_harness_server(harness_args);
}
