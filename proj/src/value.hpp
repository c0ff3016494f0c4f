#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace toolmem {

/// Stored values and argument trees are JSON values; binary payloads ride in
/// nlohmann's binary type. Object keys are unique and kept in sorted order,
/// which makes the text encoding canonical by construction.
using Value = nlohmann::json;

enum class ValueKind {
    text,
    number,
    boolean,
    array,
    object,
    binary,
    null_value,
};

ValueKind kind_of(const Value& value);
const char* kind_name(ValueKind kind);

/// True when every number in the tree is finite. Non-finite numbers have no
/// canonical text form and are rejected at the store boundary.
bool all_numbers_finite(const Value& value);

/// Canonical serialization: raw bytes for binary payloads, compact JSON with
/// sorted keys and shortest round-trip numbers for everything else.
std::string canonical_text(const Value& value);
std::size_t canonical_size(const Value& value);

/// Parses canonical bytes back into a value of the given kind. Inverse of
/// canonical_text for values whose numbers are finite.
Value canonical_parse(ValueKind kind, const std::string& bytes);

/// How a value appears in agent-visible text: plain strings verbatim, binary
/// as base64, structured values in the canonical encoding.
std::string render_value(const Value& value);

/// JSON text with ", " and ": " separators, matching the argument summaries
/// that appear inside access-instruction messages.
std::string python_style_json(const Value& value);

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace toolmem
