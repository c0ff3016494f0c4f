#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "jsonrpc.hpp"
#include "ledger.hpp"
#include "mirror.hpp"
#include "store.hpp"

namespace toolmem {

inline constexpr const char* kFinalAnswerToolName = "retrieve_final_answer_from_memory";
inline constexpr const char* kProtocolVersion = "2025-03-26";

struct UpstreamEndpoint {
    enum class Kind { stdio_subprocess, tcp_socket };
    Kind kind = Kind::stdio_subprocess;
    std::string command;  // stdio-subprocess: shell command line
    std::string host;     // tcp-socket
    int port = 0;

    /// "tcp:host:port" selects a socket; anything else is a command line.
    static UpstreamEndpoint parse_spec(const std::string& spec);
    std::string display() const;
};

/// JSON-RPC client for one upstream tool server. Calls are serialized; the
/// constructor performs the initialize handshake.
class UpstreamClient {
public:
    explicit UpstreamClient(const UpstreamEndpoint& endpoint);

    std::vector<ToolDescriptor> list_tools();

    /// Runs the named tool and returns its output value (structuredContent
    /// when present, otherwise the text content as a string).
    Value call(const std::string& name, const Value& args);

private:
    Value request(const std::string& method, Value params);

    std::unique_ptr<LineTransport> transport_;
    std::mutex mutex_;
    std::int64_t next_id_ = 1;
};

/// One downstream connection's view of the world: a private session store,
/// the mirrored catalog plus the built-in final-answer tool, and the trace of
/// every call routed through it.
class ProxySession {
public:
    ProxySession(MirrorConfig config, TokenCounter counter,
                 std::optional<std::uint64_t> capacity_bytes = std::nullopt);

    SessionStore& store() { return store_; }
    const MirrorConfig& mirror_config() const { return config_; }
    const TokenCounter& counter() const { return counter_; }

    /// Mirrors and registers locally-defined tools.
    void register_local_tools(std::vector<CallableTool> tools);

    /// Connects, lists the upstream catalog, registers mirrored variants.
    /// Returns the upstream (original) descriptors.
    std::vector<ToolDescriptor> connect_upstream(const UpstreamEndpoint& endpoint);

    /// Mirrored descriptors in registration order, then the built-in
    /// final-answer tool. Original names are not advertised.
    std::vector<ToolDescriptor> list_tools() const;

    ToolResult call_tool(const std::string& name, const Value& args);

    /// Renders the full stored value as text. The one tool that emits raw
    /// stored data into agent context.
    std::string retrieve_final(const std::string& memory_path) const;

    Trace snapshot_trace() const;

private:
    struct RegisteredTool {
        ToolDescriptor mirrored;
        CallableTool original;
    };

    void add_tool(CallableTool original);
    void append_record(TraceRecord record);

    MirrorConfig config_;
    TokenCounter counter_;
    SessionStore store_;
    std::vector<std::shared_ptr<UpstreamClient>> upstreams_;
    std::map<std::string, RegisteredTool> tools_by_mirrored_name_;
    std::vector<std::string> catalog_order_;
    mutable std::mutex trace_mutex_;
    Trace trace_;
    std::atomic<std::size_t> next_step_{0};
};

ToolDescriptor final_answer_descriptor();
Value descriptor_to_json(const ToolDescriptor& descriptor);

struct ServeOptions {
    bool concurrent_calls = true;
    std::string server_name = "toolmem";
};

/// Downstream serve loop: answers initialize / tools/list / tools/call until
/// EOF. tools/call requests are dispatched concurrently; responses carry the
/// caller's id. Application failures map to the documented error codes.
void serve_session(LineTransport& transport, ProxySession& session,
                   const ServeOptions& options = {});

/// Plain (unmirrored) tool server used as a synthetic upstream.
void serve_plain_tools(LineTransport& transport, const std::vector<CallableTool>& tools,
                       const std::string& server_name);

}  // namespace toolmem
