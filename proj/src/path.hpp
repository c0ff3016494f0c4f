#pragma once

#include <optional>
#include <string>
#include <vector>

#include "store.hpp"
#include "value.hpp"

namespace toolmem {

/// Normative memory-path grammar. A path names a whole stored value
/// (`tool-uuid`) or one top-level field of an object value (`tool-uuid/key`).
inline constexpr const char* kPathGrammarPattern =
    "^[A-Za-z0-9_]+-[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-"
    "[0-9a-f]{12}(/[^/]+)?$";

struct MemoryPath {
    std::string tool_name;
    std::string uuid;
    std::optional<std::string> subkey;

    bool operator==(const MemoryPath&) const = default;
};

std::string render(const MemoryPath& path);

/// Whole-string match against the grammar; never matches a substring.
/// Non-path text is a normal outcome, not an error.
std::optional<MemoryPath> parse(const std::string& text);

/// All grammar-valid paths appearing as maximal tokens inside free text, in
/// order of appearance. Used to pull paths out of instruction messages.
std::vector<MemoryPath> find_paths_in_text(const std::string& text);

/// Replaces every string leaf that is a live memory path with the stored
/// value it names, at any depth. Strings that match the grammar but are not
/// in the store signal a stale or hallucinated reference and raise
/// DanglingPath; everything else passes through untouched.
Value resolve_arguments(const Value& args, const SessionStore& store);

}  // namespace toolmem
