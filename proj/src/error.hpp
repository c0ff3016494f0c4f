#pragma once

#include <stdexcept>
#include <string>

namespace toolmem {

enum class ErrorCode {
    not_found,
    dangling_path,
    capacity_exceeded,
    invalid_tool_name,
    invalid_value,
    name_collision,
    unknown_tool,
    tool_execution,
    protocol,
    transport,
    shape_mismatch,
    file_not_found,
    malformed_document,
    context_overflow,
    parse,
    validation,
};

const char* error_code_name(ErrorCode code);

/// JSON-RPC error number for application-level failures surfaced over the
/// wire. Codes are part of the documented protocol surface.
int jsonrpc_error_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    const char* code_name() const noexcept { return error_code_name(code_); }

private:
    ErrorCode code_;
};

}  // namespace toolmem
