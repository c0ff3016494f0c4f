#include "uuid.hpp"

#include <memory>
#include <random>

namespace toolmem {

namespace {

std::string format_v4(std::uint64_t hi, std::uint64_t lo) {
    static const char* hex = "0123456789abcdef";
    // Layout: xxxxxxxx-xxxx-4xxx-Nxxx-xxxxxxxxxxxx with N in {8,9,a,b}.
    std::uint8_t bytes[16];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    for (int i = 0; i < 8; ++i) bytes[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
    bytes[6] = static_cast<std::uint8_t>((bytes[6] & 0x0f) | 0x40);
    bytes[8] = static_cast<std::uint8_t>((bytes[8] & 0x3f) | 0x80);

    std::string out;
    out.reserve(36);
    for (int i = 0; i < 16; ++i) {
        if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
        out.push_back(hex[bytes[i] >> 4]);
        out.push_back(hex[bytes[i] & 0x0f]);
    }
    return out;
}

}  // namespace

UuidSource random_uuid_source() {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    auto rng = std::make_shared<std::mt19937_64>(seq);
    return [rng]() { return format_v4((*rng)(), (*rng)()); };
}

UuidSource seeded_uuid_source(std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [rng]() { return format_v4((*rng)(), (*rng)()); };
}

UuidSource fixed_uuid_source(std::vector<std::string> uuids, UuidSource tail) {
    auto queue = std::make_shared<std::vector<std::string>>(std::move(uuids));
    auto index = std::make_shared<std::size_t>(0);
    return [queue, index, tail]() {
        if (*index < queue->size()) return (*queue)[(*index)++];
        return tail();
    };
}

bool is_v4_uuid(const std::string& text) {
    if (text.size() != 36) return false;
    auto lower_hex = [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); };
    for (std::size_t i = 0; i < 36; ++i) {
        if (i == 8 || i == 13 || i == 18 || i == 23) {
            if (text[i] != '-') return false;
        } else if (!lower_hex(text[i])) {
            return false;
        }
    }
    if (text[14] != '4') return false;
    char variant = text[19];
    return variant == '8' || variant == '9' || variant == 'a' || variant == 'b';
}

}  // namespace toolmem
