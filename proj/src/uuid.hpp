#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace toolmem {

/// Produces version-4 UUID strings (lowercase, hyphenated).
using UuidSource = std::function<std::string()>;

/// Cryptographically-seeded random source. Thread safety is the caller's
/// concern; SessionStore invokes its source under its own lock.
UuidSource random_uuid_source();

/// Deterministic source for reproducible runs and golden traces.
UuidSource seeded_uuid_source(std::uint64_t seed);

/// Emits the given UUIDs in order, then falls back to `tail`.
UuidSource fixed_uuid_source(std::vector<std::string> uuids, UuidSource tail);

bool is_v4_uuid(const std::string& text);

}  // namespace toolmem
