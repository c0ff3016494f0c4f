#include "mirror.hpp"

#include "error.hpp"

namespace toolmem {

namespace {

void replace_all(std::string& text, const std::string& placeholder,
                 const std::string& replacement) {
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
        text.replace(pos, placeholder.size(), replacement);
        pos += replacement.size();
    }
}

std::string join_natural(const std::vector<std::string>& items, const std::string& last_sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out.append(i + 1 == items.size() ? last_sep : std::string(", "));
        out.append(items[i]);
    }
    return out;
}

}  // namespace

ToolDescriptor mirror_tool(const ToolDescriptor& original, const MirrorConfig& config) {
    if (!valid_tool_name(original.name))
        throw Error(ErrorCode::invalid_tool_name,
                    "tool name '" + original.name + "' does not match [A-Za-z0-9_]+");
    ToolDescriptor mirrored = original;
    mirrored.name = original.name + config.name_suffix;
    if (!mirrored.description.empty() && mirrored.description.back() != ' ')
        mirrored.description.push_back(' ');
    mirrored.description +=
        "Any parameter may be given either a raw value or a memory path "
        "referencing a stored value.";
    return mirrored;
}

std::string render_instruction(const std::string& tool_name,
                               const std::string& arg_summary,
                               const std::string& base_path,
                               const std::vector<std::string>& child_keys,
                               const MirrorConfig& config) {
    std::string text = config.base_template;
    replace_all(text, "{tool}", tool_name);
    replace_all(text, "{args}", arg_summary);
    replace_all(text, "{path}", base_path);

    if (!child_keys.empty()) {
        std::vector<std::string> key_paths;
        key_paths.reserve(child_keys.size());
        for (const auto& key : child_keys) key_paths.push_back(base_path + "/" + key);

        std::string addendum = config.keys_addendum_template;
        replace_all(addendum, "{keys}", join_natural(child_keys, " and "));
        replace_all(addendum, "{key_paths}", join_natural(key_paths, " or "));
        text += addendum;
    }
    return text;
}

ToolResult postprocess(const std::string& tool_name, Value output, SessionStore& store,
                       const MirrorConfig& config, const std::string& arg_summary) {
    if (canonical_size(output) <= config.threshold_bytes)
        return ToolResult{std::move(output), std::nullopt};

    std::vector<std::string> child_keys;
    if (output.is_object())
        for (auto it = output.cbegin(); it != output.cend(); ++it)
            child_keys.push_back(it.key());

    std::string base_path = store.put(tool_name, std::move(output));
    auto parsed = parse(base_path);

    AccessInstruction instruction;
    instruction.text =
        render_instruction(tool_name, arg_summary, base_path, child_keys, config);
    instruction.base_path = *parsed;
    instruction.child_keys = std::move(child_keys);
    return ToolResult{Value(), std::move(instruction)};
}

ToolResult invoke_mirrored(const CallableTool& original, const Value& args,
                           SessionStore& store, const MirrorConfig& config) {
    std::string arg_summary = python_style_json(args);
    Value resolved = resolve_arguments(args, store);

    Value output;
    try {
        output = original.fn(resolved);
    } catch (const Error& e) {
        throw Error(ErrorCode::tool_execution,
                    "tool '" + original.descriptor.name + "' failed: " + e.what());
    } catch (const std::exception& e) {
        throw Error(ErrorCode::tool_execution,
                    "tool '" + original.descriptor.name + "' failed: " + e.what());
    }
    return postprocess(original.descriptor.name, std::move(output), store, config,
                       arg_summary);
}

}  // namespace toolmem
