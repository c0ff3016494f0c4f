#include "ledger.hpp"

#include <cctype>

#include "error.hpp"
#include "path.hpp"

namespace toolmem {

TokenCounter make_counter(const std::string& id) {
    if (id == "bytes4") {
        return {id, [](std::string_view text) { return (text.size() + 3) / 4; }};
    }
    if (id == "words") {
        return {id, [](std::string_view text) {
                    std::size_t words = 0;
                    bool in_word = false;
                    for (char c : text) {
                        bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
                        if (!space && !in_word) ++words;
                        in_word = !space;
                    }
                    return words;
                }};
    }
    throw Error(ErrorCode::validation, "unknown token counter scheme '" + id + "'");
}

std::size_t count_tokens(std::string_view text, const TokenCounter& counter) {
    return counter.count(text);
}

std::size_t record_counterfactual_tokens(const TraceRecord& record,
                                         const SessionStore& store,
                                         const TokenCounter& counter) {
    // Path arguments inline the values they point at; substitution is exactly
    // argument resolution.
    std::string cf_args = python_style_json(resolve_arguments(record.args, store));
    std::string cf_result = record.stored_path
                                ? render_value(*store.get(*record.stored_path))
                                : record.result_text;
    return counter.count(cf_args) + counter.count(cf_result);
}

std::size_t counterfactual_tokens(const Trace& trace, const SessionStore& store,
                                  const TokenCounter& counter) {
    std::size_t total = 0;
    for (const auto& record : trace.records)
        total += record_counterfactual_tokens(record, store, counter);
    return total;
}

Value trace_record_json(const TraceRecord& record) {
    Value out;
    out["step"] = record.step;
    out["tool_name"] = record.tool_name;
    out["args"] = record.args;
    out["args_text"] = record.args_text;
    out["result_text"] = record.result_text;
    if (record.stored_path) out["stored_path"] = *record.stored_path;
    out["tokens_actual"] = record.tokens_actual;
    out["tokens_counterfactual"] = record.tokens_counterfactual;
    out["wall_seconds"] = record.wall_seconds;
    return out;
}

Value trace_json(const Trace& trace) {
    Value records = Value::array();
    for (const auto& record : trace.records) records.push_back(trace_record_json(record));
    Value out;
    out["records"] = std::move(records);
    out["completed"] = trace.completed;
    if (trace.failure_reason) out["failure_reason"] = *trace.failure_reason;
    if (trace.failing_step) out["failing_step"] = *trace.failing_step;
    if (trace.final_answer) out["final_answer"] = *trace.final_answer;
    return out;
}

Value RunReport::to_json() const {
    Value out;
    out["total_tokens_actual"] = total_tokens_actual;
    out["total_tokens_counterfactual"] = total_tokens_counterfactual;
    out["steps"] = steps;
    out["wall_time_seconds"] = wall_time_seconds;
    out["completed"] = completed;
    if (failure_reason) out["failure_reason"] = *failure_reason;
    if (failing_step) out["failing_step"] = *failing_step;
    if (final_answer) out["final_answer"] = *final_answer;
    return out;
}

RunReport report(const Trace& trace) {
    RunReport out;
    out.steps = trace.records.size();
    for (const auto& record : trace.records) {
        out.total_tokens_actual += record.tokens_actual;
        out.total_tokens_counterfactual += record.tokens_counterfactual;
        out.wall_time_seconds += record.wall_seconds;
    }
    out.completed = trace.completed;
    out.failure_reason = trace.failure_reason;
    out.failing_step = trace.failing_step;
    out.final_answer = trace.final_answer;
    return out;
}

}  // namespace toolmem
