#include "path.hpp"

#include "error.hpp"
#include "uuid.hpp"

namespace toolmem {

std::string render(const MemoryPath& path) {
    std::string out = path.tool_name + "-" + path.uuid;
    if (path.subkey) {
        out.push_back('/');
        out.append(*path.subkey);
    }
    return out;
}

std::optional<MemoryPath> parse(const std::string& text) {
    // tool_name cannot contain '-', so the name ends at the first hyphen and
    // the 36 characters after it must form the v4 UUID.
    auto hyphen = text.find('-');
    if (hyphen == std::string::npos || hyphen == 0) return std::nullopt;

    MemoryPath path;
    path.tool_name = text.substr(0, hyphen);
    if (!valid_tool_name(path.tool_name)) return std::nullopt;

    std::size_t uuid_begin = hyphen + 1;
    if (text.size() < uuid_begin + 36) return std::nullopt;
    path.uuid = text.substr(uuid_begin, 36);
    if (!is_v4_uuid(path.uuid)) return std::nullopt;

    std::size_t rest = uuid_begin + 36;
    if (rest == text.size()) return path;
    if (text[rest] != '/') return std::nullopt;
    std::string subkey = text.substr(rest + 1);
    if (subkey.empty() || subkey.find('/') != std::string::npos) return std::nullopt;
    path.subkey = std::move(subkey);
    return path;
}

std::vector<MemoryPath> find_paths_in_text(const std::string& text) {
    auto is_token_char = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
               (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '/';
    };
    std::vector<MemoryPath> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_token_char(text[i])) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && is_token_char(text[i])) ++i;
        if (auto path = parse(text.substr(begin, i - begin))) out.push_back(*path);
    }
    return out;
}

namespace {

Value resolve_node(const Value& node, const SessionStore& store) {
    if (node.is_string()) {
        const auto& text = node.get_ref<const std::string&>();
        if (parse(text)) {
            if (!store.contains(text))
                throw Error(ErrorCode::dangling_path,
                            "memory path '" + text + "' is not present in the store");
            return *store.get(text);
        }
        return node;
    }
    if (node.is_array()) {
        Value out = Value::array();
        for (const auto& item : node) out.push_back(resolve_node(item, store));
        return out;
    }
    if (node.is_object()) {
        Value out = Value::object();
        for (auto it = node.cbegin(); it != node.cend(); ++it)
            out[it.key()] = resolve_node(it.value(), store);
        return out;
    }
    return node;
}

}  // namespace

Value resolve_arguments(const Value& args, const SessionStore& store) {
    return resolve_node(args, store);
}

}  // namespace toolmem
