#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "store.hpp"
#include "value.hpp"

namespace toolmem {

/// Pure text -> token-count function. Any scheme must satisfy count("") == 0
/// and count(a+b) <= count(a) + count(b) + 1.
struct TokenCounter {
    std::string id;
    std::function<std::size_t(std::string_view)> count;
};

/// Known schemes: "bytes4" (default, ceil(bytes/4)) and "words"
/// (whitespace-delimited count).
TokenCounter make_counter(const std::string& id);

std::size_t count_tokens(std::string_view text, const TokenCounter& counter);

/// One agent step: which tool ran, with what (pre-resolution) arguments, and
/// what came back. `stored_path` is set when the result was an access
/// instruction, naming the base path holding the real output.
struct TraceRecord {
    std::size_t step = 0;
    std::string tool_name;
    Value args;
    std::string args_text;
    std::string result_text;
    std::optional<std::string> stored_path;
    std::size_t tokens_actual = 0;
    std::size_t tokens_counterfactual = 0;
    double wall_seconds = 0.0;
};

struct Trace {
    std::vector<TraceRecord> records;
    bool completed = true;
    std::optional<std::string> failure_reason;
    std::optional<std::size_t> failing_step;
    std::optional<std::string> final_answer;
};

/// Tokens a record would have cost with raw values inlined: path arguments
/// and instruction messages are substituted with the rendered stored values.
std::size_t record_counterfactual_tokens(const TraceRecord& record,
                                         const SessionStore& store,
                                         const TokenCounter& counter);

/// Total over the trace. Monotone in the size of the stored values.
std::size_t counterfactual_tokens(const Trace& trace, const SessionStore& store,
                                  const TokenCounter& counter);

Value trace_record_json(const TraceRecord& record);
Value trace_json(const Trace& trace);

struct RunReport {
    std::size_t total_tokens_actual = 0;
    std::size_t total_tokens_counterfactual = 0;
    std::size_t steps = 0;
    double wall_time_seconds = 0.0;
    bool completed = true;
    std::optional<std::string> failure_reason;
    std::optional<std::size_t> failing_step;
    std::optional<std::string> final_answer;

    Value to_json() const;
};

RunReport report(const Trace& trace);

}  // namespace toolmem
