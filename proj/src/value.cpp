#include "value.hpp"

#include <cmath>

#include "error.hpp"

namespace toolmem {

ValueKind kind_of(const Value& value) {
    switch (value.type()) {
        case nlohmann::json::value_t::string: return ValueKind::text;
        case nlohmann::json::value_t::number_integer:
        case nlohmann::json::value_t::number_unsigned:
        case nlohmann::json::value_t::number_float: return ValueKind::number;
        case nlohmann::json::value_t::boolean: return ValueKind::boolean;
        case nlohmann::json::value_t::array: return ValueKind::array;
        case nlohmann::json::value_t::object: return ValueKind::object;
        case nlohmann::json::value_t::binary: return ValueKind::binary;
        default: return ValueKind::null_value;
    }
}

const char* kind_name(ValueKind kind) {
    switch (kind) {
        case ValueKind::text: return "text";
        case ValueKind::number: return "number";
        case ValueKind::boolean: return "boolean";
        case ValueKind::array: return "array";
        case ValueKind::object: return "object";
        case ValueKind::binary: return "binary";
        case ValueKind::null_value: return "null";
    }
    return "unknown";
}

bool all_numbers_finite(const Value& value) {
    if (value.is_number_float()) return std::isfinite(value.get<double>());
    if (value.is_array()) {
        for (const auto& item : value)
            if (!all_numbers_finite(item)) return false;
    } else if (value.is_object()) {
        for (const auto& [key, item] : value.items())
            if (!all_numbers_finite(item)) return false;
    }
    return true;
}

std::string canonical_text(const Value& value) {
    if (value.is_binary()) {
        const auto& bytes = value.get_binary();
        return std::string(bytes.begin(), bytes.end());
    }
    return value.dump();
}

std::size_t canonical_size(const Value& value) {
    return canonical_text(value).size();
}

Value canonical_parse(ValueKind kind, const std::string& bytes) {
    if (kind == ValueKind::binary) {
        return Value::binary(
            std::vector<std::uint8_t>(bytes.begin(), bytes.end()));
    }
    return Value::parse(bytes);
}

std::string render_value(const Value& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_binary()) {
        const auto& bytes = value.get_binary();
        return base64_encode(bytes.data(), bytes.size());
    }
    return value.dump();
}

namespace {

void python_style_append(const Value& value, std::string& out) {
    if (value.is_object()) {
        out.push_back('{');
        bool first = true;
        for (const auto& [key, item] : value.items()) {
            if (!first) out.append(", ");
            first = false;
            out.append(Value(key).dump());
            out.append(": ");
            python_style_append(item, out);
        }
        out.push_back('}');
    } else if (value.is_array()) {
        out.push_back('[');
        bool first = true;
        for (const auto& item : value) {
            if (!first) out.append(", ");
            first = false;
            python_style_append(item, out);
        }
        out.push_back(']');
    } else if (value.is_binary()) {
        const auto& bytes = value.get_binary();
        out.append(Value(base64_encode(bytes.data(), bytes.size())).dump());
    } else {
        out.append(value.dump());
    }
}

}  // namespace

std::string python_style_json(const Value& value) {
    std::string out;
    python_style_append(value, out);
    return out;
}

static const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::uint8_t* data, std::size_t size) {
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    for (std::size_t i = 0; i < size; i += 3) {
        std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < size) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < size) chunk |= static_cast<std::uint32_t>(data[i + 2]);
        out.push_back(kB64Alphabet[(chunk >> 18) & 0x3f]);
        out.push_back(kB64Alphabet[(chunk >> 12) & 0x3f]);
        out.push_back(i + 1 < size ? kB64Alphabet[(chunk >> 6) & 0x3f] : '=');
        out.push_back(i + 2 < size ? kB64Alphabet[chunk & 0x3f] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0)
        throw Error(ErrorCode::invalid_value, "base64 text length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            char c = text[i + k];
            if (c == '=') {
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = value_of(c);
                if (vals[k] < 0 || pad > 0)
                    throw Error(ErrorCode::invalid_value, "invalid base64 character");
            }
        }
        std::uint32_t chunk = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out.push_back(static_cast<std::uint8_t>((chunk >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((chunk >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(chunk & 0xff));
    }
    return out;
}

}  // namespace toolmem
