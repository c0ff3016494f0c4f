#include "experiment.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "harness_tools.hpp"
#include "mirror.hpp"
#include "proxy.hpp"
#include "uuid.hpp"

namespace toolmem {

const char* const kGridRunUuids[2] = {
    "fcb87ffa-31b7-41b0-bf90-76d0c87000f5",
    "30daddd0-d4a1-4689-bc78-32eb93b16252",
};
const char* const kSdsRunUuids[2] = {
    "d719493f-b573-4dc2-b15c-6d031f64b7af",
    "3bec235a-8bb3-4e1f-b049-029c655f54f1",
};

namespace {

constexpr const char* kQuerySmiles = "OC12COC3=NCC1C23";

struct PlanStep {
    std::string tool;  // original tool name; the mirrored run adds the suffix
    std::function<Value(const std::map<std::string, std::string>& base_paths,
                        const std::map<std::string, Value>& outputs)>
        make_args;
    bool final_retrieval = false;  // retrieve the answer from memory (mirrored only)
};

/// The replayed tool plans. In mirrored mode argument slots are filled with
/// memory paths from prior access instructions; in conventional mode with the
/// prior raw outputs themselves.
std::vector<PlanStep> experiment_plan(const ExperimentConfig& config, bool mirrored) {
    std::vector<PlanStep> plan;
    if (config.experiment == "grid") {
        plan.push_back({"generate_molecule_grid",
                        [](const auto&, const auto&) {
                            return Value{{"molecule_description", kQuerySmiles}};
                        }});
        if (mirrored) {
            plan.push_back({"retrieve_similar_molecules",
                            [](const auto& paths, const auto&) {
                                return Value{{"raw_grid",
                                              paths.at("generate_molecule_grid") + "/raw_grid"}};
                            }});
            plan.push_back({"retrieve_final",
                            [](const auto& paths, const auto&) {
                                return Value{{"memory_path",
                                              paths.at("retrieve_similar_molecules")}};
                            },
                            true});
        } else {
            plan.push_back({"retrieve_similar_molecules",
                            [](const auto&, const auto& outputs) {
                                return Value{{"raw_grid",
                                              outputs.at("generate_molecule_grid")["raw_grid"]}};
                            }});
        }
        return plan;
    }
    if (config.experiment == "sds") {
        const std::string document = config.sds_document;
        plan.push_back({"tika", [document](const auto&, const auto&) {
                            return Value{{"pdf_path", document}};
                        }});
        if (mirrored) {
            plan.push_back({"extract_sds",
                            [](const auto& paths, const auto&) {
                                return Value{{"content", paths.at("tika")}};
                            }});
            plan.push_back({"retrieve_final",
                            [](const auto& paths, const auto&) {
                                return Value{{"memory_path",
                                              paths.at("extract_sds") + "/ingredients"}};
                            },
                            true});
            plan.push_back({"retrieve_final",
                            [](const auto& paths, const auto&) {
                                return Value{{"memory_path", paths.at("extract_sds")}};
                            },
                            true});
        } else {
            plan.push_back({"extract_sds", [](const auto&, const auto& outputs) {
                                return Value{{"content", outputs.at("tika")}};
                            }});
        }
        return plan;
    }
    throw Error(ErrorCode::validation,
                "unknown experiment '" + config.experiment + "' (expected grid or sds)");
}

std::vector<CallableTool> experiment_toolset(const ExperimentConfig& config) {
    if (config.experiment == "grid") {
        harness::GridConfig grid{config.grid_dim};
        auto corpus = harness::SimilarityCorpus::load(config.fixture_dir + "/corpus.json",
                                                      config.top_k);
        return harness::grid_toolset(grid, corpus);
    }
    harness::DocumentRoot root;
    root.directory = config.fixture_dir + "/sds";
    root.aliases["sds.pdf"] = config.fixture_dir + "/sds/titanium.txt";
    return harness::sds_toolset(root);
}

UuidSource experiment_uuid_source(const ExperimentConfig& config) {
    UuidSource tail = config.uuid_seed.has_value() ? seeded_uuid_source(*config.uuid_seed)
                                                   : random_uuid_source();
    if (!config.golden_uuids) return tail;
    const char* const* fixed =
        config.experiment == "grid" ? kGridRunUuids : kSdsRunUuids;
    return fixed_uuid_source({fixed[0], fixed[1]}, std::move(tail));
}

ExperimentResult run_mirrored(const ExperimentConfig& config) {
    MirrorConfig mirror;
    mirror.threshold_bytes = config.threshold_bytes;
    ProxySession session(mirror, make_counter(config.counter_id));
    session.store().set_uuid_source(experiment_uuid_source(config));
    session.register_local_tools(experiment_toolset(config));

    std::map<std::string, std::string> base_paths;
    std::map<std::string, Value> outputs;  // unused in this mode
    std::uint64_t context_tokens = 0;
    std::string last_text;
    Trace trace;

    const auto plan = experiment_plan(config, /*mirrored=*/true);
    for (std::size_t index = 0; index < plan.size(); ++index) {
        const PlanStep& step = plan[index];
        const std::string call_name = step.final_retrieval
                                          ? std::string(kFinalAnswerToolName)
                                          : step.tool + mirror.name_suffix;
        const Value args = step.make_args(base_paths, outputs);
        const ToolResult result = session.call_tool(call_name, args);
        last_text = result.rendered_text();
        if (result.stored()) {
            base_paths[step.tool] = render(result.instruction->base_path);
        }
        context_tokens += session.counter().count(python_style_json(args)) +
                          session.counter().count(last_text);
        if (context_tokens > config.context_limit_tokens) {
            trace = session.snapshot_trace();
            trace.completed = false;
            trace.failure_reason = error_code_name(ErrorCode::context_overflow);
            trace.failing_step = index;
            return {trace, report(trace)};
        }
    }
    trace = session.snapshot_trace();
    trace.final_answer = last_text;
    return {trace, report(trace)};
}

ExperimentResult run_conventional(const ExperimentConfig& config) {
    const TokenCounter counter = make_counter(config.counter_id);
    std::map<std::string, const CallableTool*> tools;
    const auto toolset = experiment_toolset(config);
    for (const CallableTool& tool : toolset) tools[tool.descriptor.name] = &tool;

    std::map<std::string, std::string> base_paths;  // unused in this mode
    std::map<std::string, Value> outputs;
    std::uint64_t context_tokens = 0;
    Trace trace;

    const auto plan = experiment_plan(config, /*mirrored=*/false);
    for (std::size_t index = 0; index < plan.size(); ++index) {
        const PlanStep& step = plan[index];
        const auto started = std::chrono::steady_clock::now();
        const Value args = step.make_args(base_paths, outputs);
        const Value output = tools.at(step.tool)->fn(args);

        TraceRecord record;
        record.step = index;
        record.tool_name = step.tool;
        record.args = args;
        record.args_text = python_style_json(args);
        record.result_text = render_value(output);
        record.tokens_actual =
            counter.count(record.args_text) + counter.count(record.result_text);
        // Nothing is virtualized in this mode, so the hypothetical inlined
        // cost equals the real one.
        record.tokens_counterfactual = record.tokens_actual;
        record.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        context_tokens += record.tokens_actual;
        trace.records.push_back(std::move(record));

        if (context_tokens > config.context_limit_tokens) {
            trace.completed = false;
            trace.failure_reason = error_code_name(ErrorCode::context_overflow);
            trace.failing_step = index;
            return {trace, report(trace)};
        }
        outputs[step.tool] = output;
    }
    if (!trace.records.empty()) trace.final_answer = trace.records.back().result_text;
    return {trace, report(trace)};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Value& json) {
    if (!json.is_object()) {
        throw Error(ErrorCode::validation, "experiment config must be a JSON object");
    }
    ExperimentConfig config;
    for (const auto& [key, value] : json.items()) {
        if (key == "experiment" && value.is_string()) {
            config.experiment = value.get<std::string>();
        } else if (key == "mode" && value.is_string()) {
            config.mode = value.get<std::string>();
        } else if (key == "grid_dim" && value.is_number_integer()) {
            config.grid_dim = value.get<int>();
        } else if (key == "top_k" && value.is_number_integer()) {
            config.top_k = value.get<int>();
        } else if (key == "threshold_bytes" && value.is_number_integer()) {
            config.threshold_bytes = value.get<std::size_t>();
        } else if (key == "context_limit_tokens" && value.is_number_integer()) {
            config.context_limit_tokens = value.get<std::uint64_t>();
        } else if (key == "counter" && value.is_string()) {
            config.counter_id = value.get<std::string>();
        } else if (key == "fixture_dir" && value.is_string()) {
            config.fixture_dir = value.get<std::string>();
        } else if (key == "sds_document" && value.is_string()) {
            config.sds_document = value.get<std::string>();
        } else if (key == "golden_uuids" && value.is_boolean()) {
            config.golden_uuids = value.get<bool>();
        } else if (key == "uuid_seed" && value.is_number_integer()) {
            config.uuid_seed = value.get<std::uint64_t>();
        } else {
            throw Error(ErrorCode::validation,
                        "unknown or ill-typed experiment config key '" + key + "'");
        }
    }
    return config;
}

Value ExperimentConfig::to_json() const {
    Value out;
    out["experiment"] = experiment;
    out["mode"] = mode;
    out["grid_dim"] = grid_dim;
    out["top_k"] = top_k;
    out["threshold_bytes"] = threshold_bytes;
    out["context_limit_tokens"] = context_limit_tokens;
    out["counter"] = counter_id;
    out["fixture_dir"] = fixture_dir;
    out["sds_document"] = sds_document;
    out["golden_uuids"] = golden_uuids;
    if (uuid_seed) out["uuid_seed"] = *uuid_seed;
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.experiment != "grid" && config.experiment != "sds") {
        throw Error(ErrorCode::validation,
                    "unknown experiment '" + config.experiment + "' (expected grid or sds)");
    }
    if (config.mode != "conventional" && config.mode != "mirrored") {
        throw Error(ErrorCode::validation,
                    "unknown mode '" + config.mode + "' (expected conventional or mirrored)");
    }
    if (config.grid_dim < 1) {
        throw Error(ErrorCode::validation, "grid_dim must be at least 1");
    }
    if (config.top_k < 1) {
        throw Error(ErrorCode::validation, "top_k must be at least 1");
    }
    if (config.context_limit_tokens == 0) {
        throw Error(ErrorCode::validation, "context_limit_tokens must be positive");
    }
    return config.mode == "mirrored" ? run_mirrored(config) : run_conventional(config);
}

Value experiment_report_json(const ExperimentConfig& config, const ExperimentResult& result) {
    Value out;
    out["config"] = config.to_json();
    out["report"] = result.report.to_json();
    out["trace"] = trace_json(result.trace);
    if (result.trace.failing_step.has_value() &&
        *result.trace.failing_step < result.trace.records.size()) {
        out["report"]["failing_tool"] =
            result.trace.records[*result.trace.failing_step].tool_name;
    }
    return out;
}

}  // namespace toolmem
