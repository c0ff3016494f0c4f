#include "proxy.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <thread>
#include <utility>

#include "error.hpp"
#include "path.hpp"
#include "value.hpp"

namespace toolmem {

namespace {

constexpr const char* kServerVersion = "1.0.0";

/// Tracks in-flight worker threads so a serve loop can drain them at EOF.
class ActiveCounter {
public:
    void add() {
        std::lock_guard<std::mutex> lock(mutex_);
        ++count_;
    }
    void done() {
        std::lock_guard<std::mutex> lock(mutex_);
        --count_;
        if (count_ == 0) cv_.notify_all();
    }
    void wait_zero() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] { return count_ == 0; });
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int count_ = 0;
};

Value wire_result_for(const ToolResult& result) {
    Value wire = Value::object();
    wire["content"] = Value::array();
    if (result.instruction.has_value()) {
        wire["content"].push_back({{"type", "text"}, {"text", result.instruction->text}});
        return wire;
    }
    if (result.raw.is_string()) {
        wire["content"].push_back({{"type", "text"}, {"text", result.raw.get<std::string>()}});
        return wire;
    }
    wire["content"].push_back({{"type", "text"}, {"text", render_value(result.raw)}});
    wire["structuredContent"] = result.raw;
    return wire;
}

Value wire_result_for_plain(const Value& output) {
    Value wire = Value::object();
    wire["content"] = Value::array();
    if (output.is_string()) {
        wire["content"].push_back({{"type", "text"}, {"text", output.get<std::string>()}});
        return wire;
    }
    wire["content"].push_back({{"type", "text"}, {"text", render_value(output)}});
    wire["structuredContent"] = output;
    return wire;
}

Value application_error(const Value& id, const Error& error) {
    Value frame = jsonrpc::make_error(id, jsonrpc_error_code(error.code()), error.what());
    frame["error"]["data"] = Value{{"kind", error_code_name(error.code())}};
    return frame;
}

}  // namespace

Value descriptor_to_json(const ToolDescriptor& descriptor) {
    return Value{{"name", descriptor.name},
                 {"description", descriptor.description},
                 {"inputSchema", descriptor.parameters}};
}

UpstreamEndpoint UpstreamEndpoint::parse_spec(const std::string& spec) {
    UpstreamEndpoint endpoint;
    if (spec.rfind("tcp:", 0) == 0) {
        const std::string rest = spec.substr(4);
        const auto colon = rest.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= rest.size()) {
            throw Error(ErrorCode::validation,
                        "tcp endpoint must look like tcp:host:port, got '" + spec + "'");
        }
        endpoint.kind = Kind::tcp_socket;
        endpoint.host = rest.substr(0, colon);
        try {
            endpoint.port = std::stoi(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::validation, "invalid port in endpoint '" + spec + "'");
        }
        if (endpoint.port <= 0 || endpoint.port > 65535) {
            throw Error(ErrorCode::validation, "invalid port in endpoint '" + spec + "'");
        }
        return endpoint;
    }
    if (spec.empty()) {
        throw Error(ErrorCode::validation, "upstream endpoint must not be empty");
    }
    endpoint.kind = Kind::stdio_subprocess;
    endpoint.command = spec;
    return endpoint;
}

std::string UpstreamEndpoint::display() const {
    if (kind == Kind::tcp_socket) return "tcp:" + host + ":" + std::to_string(port);
    return command;
}

UpstreamClient::UpstreamClient(const UpstreamEndpoint& endpoint) {
    if (endpoint.kind == UpstreamEndpoint::Kind::tcp_socket) {
        transport_ = connect_tcp(endpoint.host, endpoint.port);
    } else {
        transport_ = spawn_subprocess(endpoint.command);
    }
    Value params = Value::object();
    params["protocolVersion"] = kProtocolVersion;
    params["clientInfo"] = Value{{"name", "toolmem"}, {"version", kServerVersion}};
    params["capabilities"] = Value::object();
    request("initialize", std::move(params));
    std::lock_guard<std::mutex> lock(mutex_);
    transport_->write_line(jsonrpc::make_notification("notifications/initialized", Value::object()).dump());
}

Value UpstreamClient::request(const std::string& method, Value params) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::int64_t id = next_id_++;
    transport_->write_line(jsonrpc::make_request(id, method, std::move(params)).dump());
    std::string line;
    while (transport_->read_line(line)) {
        auto frame = jsonrpc::parse_frame(line);
        if (!frame.has_value()) {
            throw Error(ErrorCode::protocol, "upstream sent a malformed frame");
        }
        if (!frame->contains("id") || (*frame)["id"].is_null()) continue;  // notification/log
        if ((*frame)["id"] != Value(id)) continue;  // stale response for another id
        if (frame->contains("error")) {
            const Value& error = (*frame)["error"];
            const std::string message =
                error.is_object() && error.contains("message") && error["message"].is_string()
                    ? error["message"].get<std::string>()
                    : error.dump();
            throw Error(ErrorCode::tool_execution, message);
        }
        if (!frame->contains("result")) {
            throw Error(ErrorCode::protocol, "upstream response carries neither result nor error");
        }
        return (*frame)["result"];
    }
    throw Error(ErrorCode::transport,
                "upstream closed the connection while a response was pending");
}

std::vector<ToolDescriptor> UpstreamClient::list_tools() {
    const Value result = request("tools/list", Value::object());
    if (!result.is_object() || !result.contains("tools") || !result["tools"].is_array()) {
        throw Error(ErrorCode::protocol, "tools/list result lacks a tools array");
    }
    std::vector<ToolDescriptor> descriptors;
    for (const Value& entry : result["tools"]) {
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
            throw Error(ErrorCode::protocol, "tools/list entry lacks a name");
        }
        ToolDescriptor descriptor;
        descriptor.name = entry["name"].get<std::string>();
        if (entry.contains("description") && entry["description"].is_string()) {
            descriptor.description = entry["description"].get<std::string>();
        }
        if (entry.contains("inputSchema") && entry["inputSchema"].is_object()) {
            descriptor.parameters = entry["inputSchema"];
        }
        descriptors.push_back(std::move(descriptor));
    }
    return descriptors;
}

Value UpstreamClient::call(const std::string& name, const Value& args) {
    Value params = Value::object();
    params["name"] = name;
    params["arguments"] = args;
    const Value result = request("tools/call", std::move(params));
    if (result.is_object() && result.contains("structuredContent")) {
        return result["structuredContent"];
    }
    if (result.is_object() && result.contains("content") && result["content"].is_array()) {
        for (const Value& block : result["content"]) {
            if (block.is_object() && block.value("type", "") == "text" &&
                block.contains("text") && block["text"].is_string()) {
                return block["text"];
            }
        }
    }
    throw Error(ErrorCode::protocol,
                "tools/call result for '" + name + "' carries no usable content");
}

ToolDescriptor final_answer_descriptor() {
    ToolDescriptor descriptor;
    descriptor.name = kFinalAnswerToolName;
    descriptor.description =
        "Retrieve the full value stored at a memory path and return it verbatim. "
        "Use this once, at the end of the task, to surface the final answer.";
    descriptor.parameters = Value{
        {"type", "object"},
        {"properties",
         Value{{"memory_path",
                Value{{"type", "string"},
                      {"description", "Memory path of the stored value to retrieve."}}}}},
        {"required", Value::array({"memory_path"})},
    };
    return descriptor;
}

ProxySession::ProxySession(MirrorConfig config, TokenCounter counter,
                           std::optional<std::uint64_t> capacity_bytes)
    : config_(std::move(config)), counter_(std::move(counter)), store_(capacity_bytes) {}

void ProxySession::add_tool(CallableTool original) {
    RegisteredTool registered;
    registered.mirrored = mirror_tool(original.descriptor, config_);
    registered.original = std::move(original);
    const std::string name = registered.mirrored.name;
    if (name == kFinalAnswerToolName) {
        throw Error(ErrorCode::name_collision,
                    "mirrored tool name collides with built-in '" + name + "'");
    }
    if (tools_by_mirrored_name_.count(name) != 0) {
        throw Error(ErrorCode::name_collision,
                    "a tool named '" + name + "' is already registered");
    }
    catalog_order_.push_back(name);
    tools_by_mirrored_name_.emplace(name, std::move(registered));
}

void ProxySession::register_local_tools(std::vector<CallableTool> tools) {
    for (CallableTool& tool : tools) add_tool(std::move(tool));
}

std::vector<ToolDescriptor> ProxySession::connect_upstream(const UpstreamEndpoint& endpoint) {
    auto client = std::make_shared<UpstreamClient>(endpoint);
    std::vector<ToolDescriptor> originals = client->list_tools();
    for (const ToolDescriptor& descriptor : originals) {
        CallableTool original;
        original.descriptor = descriptor;
        const std::string upstream_name = descriptor.name;
        original.fn = [client, upstream_name](const Value& args) {
            return client->call(upstream_name, args);
        };
        add_tool(std::move(original));
    }
    upstreams_.push_back(std::move(client));
    return originals;
}

std::vector<ToolDescriptor> ProxySession::list_tools() const {
    std::vector<ToolDescriptor> catalog;
    catalog.reserve(catalog_order_.size() + 1);
    for (const std::string& name : catalog_order_) {
        catalog.push_back(tools_by_mirrored_name_.at(name).mirrored);
    }
    catalog.push_back(final_answer_descriptor());
    return catalog;
}

std::string ProxySession::retrieve_final(const std::string& memory_path) const {
    if (!parse(memory_path).has_value()) {
        throw Error(ErrorCode::dangling_path,
                    "'" + memory_path + "' is not a memory path");
    }
    return render_value(*store_.get(memory_path));
}

ToolResult ProxySession::call_tool(const std::string& name, const Value& args) {
    const auto started = std::chrono::steady_clock::now();
    TraceRecord record;
    record.step = next_step_.fetch_add(1);
    record.tool_name = name;
    record.args = args;
    record.args_text = python_style_json(args);

    ToolResult result;
    if (name == kFinalAnswerToolName) {
        if (!args.is_object() || !args.contains("memory_path") ||
            !args["memory_path"].is_string()) {
            throw Error(ErrorCode::protocol,
                        std::string(kFinalAnswerToolName) +
                            " requires a string argument 'memory_path'");
        }
        result.raw = retrieve_final(args["memory_path"].get<std::string>());
    } else {
        auto found = tools_by_mirrored_name_.find(name);
        if (found == tools_by_mirrored_name_.end()) {
            throw Error(ErrorCode::unknown_tool, "unknown tool '" + name + "'");
        }
        result = invoke_mirrored(found->second.original, args, store_, config_);
    }

    record.result_text = result.rendered_text();
    if (result.instruction.has_value()) {
        record.stored_path = render(result.instruction->base_path);
    }
    record.tokens_actual =
        counter_.count(record.args_text) + counter_.count(record.result_text);
    record.tokens_counterfactual = record_counterfactual_tokens(record, store_, counter_);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    append_record(std::move(record));
    return result;
}

void ProxySession::append_record(TraceRecord record) {
    std::lock_guard<std::mutex> lock(trace_mutex_);
    trace_.records.push_back(std::move(record));
}

Trace ProxySession::snapshot_trace() const {
    std::lock_guard<std::mutex> lock(trace_mutex_);
    Trace copy = trace_;
    std::stable_sort(copy.records.begin(), copy.records.end(),
                     [](const TraceRecord& a, const TraceRecord& b) { return a.step < b.step; });
    return copy;
}

namespace {

void serve_session_loop(LineTransport& transport, ProxySession& session,
                        const ServeOptions& options, ActiveCounter& active) {
    std::string line;
    while (transport.read_line(line)) {
        auto frame = jsonrpc::parse_frame(line);
        if (!frame.has_value()) {
            transport.write_line(
                jsonrpc::make_error(Value(nullptr), -32700, "parse error").dump());
            continue;
        }
        if (!frame->contains("id")) continue;  // notification
        const Value id = (*frame)["id"];
        const std::string method = frame->value("method", std::string());
        const Value params = frame->value("params", Value::object());

        if (method == "initialize") {
            Value result = Value::object();
            result["protocolVersion"] = kProtocolVersion;
            result["serverInfo"] =
                Value{{"name", options.server_name}, {"version", kServerVersion}};
            result["capabilities"] = Value{{"tools", Value::object()}};
            transport.write_line(jsonrpc::make_result(id, std::move(result)).dump());
            continue;
        }
        if (method == "tools/list") {
            Value tools = Value::array();
            for (const ToolDescriptor& descriptor : session.list_tools()) {
                tools.push_back(descriptor_to_json(descriptor));
            }
            transport.write_line(
                jsonrpc::make_result(id, Value{{"tools", std::move(tools)}}).dump());
            continue;
        }
        if (method == "tools/call") {
            if (!params.is_object() || !params.contains("name") || !params["name"].is_string()) {
                transport.write_line(
                    jsonrpc::make_error(id, -32602, "tools/call params require a string 'name'")
                        .dump());
                continue;
            }
            const std::string name = params["name"].get<std::string>();
            const Value args = params.value("arguments", Value::object());
            auto run_call = [&transport, &session, &active, id, name, args] {
                Value response;
                try {
                    const ToolResult result = session.call_tool(name, args);
                    response = jsonrpc::make_result(id, wire_result_for(result));
                } catch (const Error& error) {
                    response = application_error(id, error);
                } catch (const std::exception& error) {
                    response = jsonrpc::make_error(id, -32000, error.what());
                }
                try {
                    transport.write_line(response.dump());
                } catch (...) {
                    // Downstream went away; nothing left to tell it.
                }
                active.done();
            };
            active.add();
            if (options.concurrent_calls) {
                std::thread(run_call).detach();
            } else {
                run_call();
            }
            continue;
        }
        transport.write_line(
            jsonrpc::make_error(id, -32601, "method '" + method + "' not found").dump());
    }
}

}  // namespace

void serve_session(LineTransport& transport, ProxySession& session,
                   const ServeOptions& options) {
    ActiveCounter active;
    // In-flight workers borrow `transport` and `active`; drain them before
    // leaving this frame, even on a transport failure.
    try {
        serve_session_loop(transport, session, options, active);
    } catch (...) {
        active.wait_zero();
        throw;
    }
    active.wait_zero();
}

void serve_plain_tools(LineTransport& transport, const std::vector<CallableTool>& tools,
                       const std::string& server_name) {
    std::map<std::string, const CallableTool*> by_name;
    for (const CallableTool& tool : tools) by_name[tool.descriptor.name] = &tool;

    std::string line;
    while (transport.read_line(line)) {
        auto frame = jsonrpc::parse_frame(line);
        if (!frame.has_value()) {
            transport.write_line(
                jsonrpc::make_error(Value(nullptr), -32700, "parse error").dump());
            continue;
        }
        if (!frame->contains("id")) continue;
        const Value id = (*frame)["id"];
        const std::string method = frame->value("method", std::string());
        const Value params = frame->value("params", Value::object());

        if (method == "initialize") {
            Value result = Value::object();
            result["protocolVersion"] = kProtocolVersion;
            result["serverInfo"] = Value{{"name", server_name}, {"version", kServerVersion}};
            result["capabilities"] = Value{{"tools", Value::object()}};
            transport.write_line(jsonrpc::make_result(id, std::move(result)).dump());
            continue;
        }
        if (method == "tools/list") {
            Value list = Value::array();
            for (const CallableTool& tool : tools) {
                list.push_back(descriptor_to_json(tool.descriptor));
            }
            transport.write_line(
                jsonrpc::make_result(id, Value{{"tools", std::move(list)}}).dump());
            continue;
        }
        if (method == "tools/call") {
            if (!params.is_object() || !params.contains("name") || !params["name"].is_string()) {
                transport.write_line(
                    jsonrpc::make_error(id, -32602, "tools/call params require a string 'name'")
                        .dump());
                continue;
            }
            const std::string name = params["name"].get<std::string>();
            auto found = by_name.find(name);
            if (found == by_name.end()) {
                transport.write_line(
                    application_error(id, Error(ErrorCode::unknown_tool,
                                                "unknown tool '" + name + "'"))
                        .dump());
                continue;
            }
            try {
                const Value output = found->second->fn(params.value("arguments", Value::object()));
                transport.write_line(
                    jsonrpc::make_result(id, wire_result_for_plain(output)).dump());
            } catch (const Error& error) {
                transport.write_line(application_error(id, error).dump());
            } catch (const std::exception& error) {
                transport.write_line(jsonrpc::make_error(id, -32000, error.what()).dump());
            }
            continue;
        }
        transport.write_line(
            jsonrpc::make_error(id, -32601, "method '" + method + "' not found").dump());
    }
}

}  // namespace toolmem
