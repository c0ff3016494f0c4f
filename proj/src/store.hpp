#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "uuid.hpp"
#include "value.hpp"

namespace toolmem {

struct EntryInfo {
    std::string path;
    ValueKind kind;
    std::size_t byte_size;
    std::string producer_tool;
    std::chrono::steady_clock::time_point created_at;
    std::optional<std::string> parent;
};

/// Session-scoped runtime memory. Tool outputs live here under unique
/// `tool-uuid` paths; object outputs additionally fan out one level, each
/// top-level key addressable as `tool-uuid/key`. Entries are immutable and
/// children are views into the parent's storage, so byte accounting charges
/// base entries only.
///
/// All operations are safe under concurrent use; values handed out are
/// immutable shared snapshots.
class SessionStore {
public:
    SessionStore();
    explicit SessionStore(std::optional<std::uint64_t> capacity_bytes);

    /// Replaces the UUID source (deterministic runs, golden traces).
    void set_uuid_source(UuidSource source);

    /// Stores `value` under a fresh `producer_tool + "-" + uuid` path and
    /// returns that base path. Object values also get one child entry per
    /// top-level key whose name is a valid subkey.
    std::string put(const std::string& producer_tool, Value value);

    /// Exact stored value; base paths yield the whole value, child paths the
    /// corresponding field.
    std::shared_ptr<const Value> get(const std::string& path) const;

    bool contains(const std::string& path) const;

    /// Lexicographically ordered listing, optionally restricted to paths
    /// with the given prefix.
    std::vector<EntryInfo> list_entries(
        const std::optional<std::string>& prefix = std::nullopt) const;

    /// Empties the store; returns how many base entries were dropped.
    std::size_t clear();

    std::uint64_t total_bytes() const;
    std::optional<std::uint64_t> capacity_bytes() const { return capacity_bytes_; }

private:
    struct Entry {
        EntryInfo info;
        std::shared_ptr<const Value> payload;
    };

    std::string fresh_base_path_locked(const std::string& producer_tool);

    mutable std::mutex mutex_;
    std::map<std::string, Entry> entries_;
    std::optional<std::uint64_t> capacity_bytes_;
    std::uint64_t total_bytes_ = 0;
    UuidSource uuid_source_;
};

bool valid_tool_name(const std::string& name);

}  // namespace toolmem
