#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ledger.hpp"
#include "value.hpp"

namespace toolmem {

/// Fixed UUID sequences that make replay runs byte-reproducible. The grid
/// and data-sheet sequences match the documented example transcripts.
extern const char* const kGridRunUuids[2];
extern const char* const kSdsRunUuids[2];

struct ExperimentConfig {
    std::string experiment = "grid";  // grid | sds
    std::string mode = "mirrored";    // conventional | mirrored
    int grid_dim = 128;
    int top_k = 10;
    std::size_t threshold_bytes = 128;
    std::uint64_t context_limit_tokens = 1'000'000;
    std::string counter_id = "bytes4";
    std::string fixture_dir = "fixtures";
    std::string sds_document = "sds.pdf";
    bool golden_uuids = false;  // inject the documented UUID sequences
    std::optional<std::uint64_t> uuid_seed;

    static ExperimentConfig from_json(const Value& json);
    Value to_json() const;
};

struct ExperimentResult {
    Trace trace;
    RunReport report;
};

/// Replays the experiment's plan once: scripted agent, deterministic tools,
/// token accounting per step. Conventional mode inlines every tool output
/// into context and aborts with ContextOverflow past the context limit;
/// mirrored mode routes calls through the virtualization layer.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// config + report + full trace as one JSON document.
Value experiment_report_json(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace toolmem
