#include "error.hpp"

namespace toolmem {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return "NotFound";
        case ErrorCode::dangling_path: return "DanglingPath";
        case ErrorCode::capacity_exceeded: return "CapacityExceeded";
        case ErrorCode::invalid_tool_name: return "InvalidToolName";
        case ErrorCode::invalid_value: return "InvalidValue";
        case ErrorCode::name_collision: return "NameCollision";
        case ErrorCode::unknown_tool: return "UnknownTool";
        case ErrorCode::tool_execution: return "ToolExecutionError";
        case ErrorCode::protocol: return "ProtocolError";
        case ErrorCode::transport: return "TransportError";
        case ErrorCode::shape_mismatch: return "ShapeMismatch";
        case ErrorCode::file_not_found: return "FileNotFound";
        case ErrorCode::malformed_document: return "MalformedDocument";
        case ErrorCode::context_overflow: return "ContextOverflow";
        case ErrorCode::parse: return "ParseError";
        case ErrorCode::validation: return "ValidationError";
    }
    return "UnknownError";
}

int jsonrpc_error_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::unknown_tool: return -32001;
        case ErrorCode::dangling_path: return -32002;
        case ErrorCode::tool_execution: return -32003;
        case ErrorCode::capacity_exceeded: return -32004;
        case ErrorCode::not_found: return -32002;  // surfaced as a dangling reference
        case ErrorCode::protocol: return -32600;
        case ErrorCode::parse: return -32700;
        default: return -32000;
    }
}

}  // namespace toolmem
