#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "path.hpp"
#include "store.hpp"
#include "value.hpp"

namespace toolmem {

/// A tool as advertised over the wire: name, description, and JSON schema of
/// its parameters.
struct ToolDescriptor {
    std::string name;
    std::string description;
    Value parameters = Value::object();
};

struct MirrorConfig {
    /// Serialized size above which outputs are stored instead of returned.
    /// Outputs exactly at the threshold pass through raw.
    std::size_t threshold_bytes = 4096;
    std::string name_suffix = "_mirrored";

    /// Instruction templates. Placeholders: {tool}, {args}, {path} in the
    /// base template; {keys} and {key_paths} in the object-keys addendum.
    std::string base_template =
        "The result of the function {tool} with the input value stored at "
        "{args} is currently stored at {path}. When you need to access it, "
        "pass as argument for the tool its path: {path}.";
    std::string keys_addendum_template =
        " The result stored is a dict with the keys {keys}. When you want to "
        "access only a particular value stored under these keys, use as "
        "memory path {key_paths}, depending on which value you want to use.";
};

/// The message handed back in place of a large output.
struct AccessInstruction {
    std::string text;
    MemoryPath base_path;
    std::vector<std::string> child_keys;
};

/// Outcome of a mirrored invocation: the raw output when it fits, otherwise
/// an access instruction naming where it went.
struct ToolResult {
    Value raw;
    std::optional<AccessInstruction> instruction;

    bool stored() const { return instruction.has_value(); }

    /// What the agent sees in its context.
    std::string rendered_text() const {
        return instruction ? instruction->text : render_value(raw);
    }
};

/// An invocable tool: descriptor plus implementation.
struct CallableTool {
    ToolDescriptor descriptor;
    std::function<Value(const Value& args)> fn;
};

/// Pointer-aware variant of a tool descriptor: suffixed name, identical
/// parameter schema, description extended with the raw-value-or-path note.
ToolDescriptor mirror_tool(const ToolDescriptor& original, const MirrorConfig& config);

std::string render_instruction(const std::string& tool_name,
                               const std::string& arg_summary,
                               const std::string& base_path,
                               const std::vector<std::string>& child_keys,
                               const MirrorConfig& config = {});

/// Stores `output` when its canonical size exceeds the threshold and renders
/// the access instruction; returns it unchanged otherwise. `arg_summary` is
/// the pre-resolution argument text quoted inside the instruction.
ToolResult postprocess(const std::string& tool_name, Value output, SessionStore& store,
                       const MirrorConfig& config, const std::string& arg_summary);

/// Full mirrored call: resolve path arguments, run the original tool on raw
/// values, post-process the output. The original tool never observes the
/// mirroring.
ToolResult invoke_mirrored(const CallableTool& original, const Value& args,
                           SessionStore& store, const MirrorConfig& config);

}  // namespace toolmem
