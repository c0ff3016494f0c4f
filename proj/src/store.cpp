#include "store.hpp"

#include "error.hpp"

namespace toolmem {

bool valid_tool_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

namespace {

bool valid_subkey(const std::string& key) {
    return !key.empty() && key.find('/') == std::string::npos;
}

}  // namespace

SessionStore::SessionStore() : SessionStore(std::nullopt) {}

SessionStore::SessionStore(std::optional<std::uint64_t> capacity_bytes)
    : capacity_bytes_(capacity_bytes), uuid_source_(random_uuid_source()) {}

void SessionStore::set_uuid_source(UuidSource source) {
    std::lock_guard lock(mutex_);
    uuid_source_ = std::move(source);
}

std::string SessionStore::fresh_base_path_locked(const std::string& producer_tool) {
    // Collision odds are negligible, but retrying makes uniqueness an
    // invariant instead of an assumption.
    for (;;) {
        std::string path = producer_tool + "-" + uuid_source_();
        if (!entries_.contains(path)) return path;
    }
}

std::string SessionStore::put(const std::string& producer_tool, Value value) {
    if (!valid_tool_name(producer_tool))
        throw Error(ErrorCode::invalid_tool_name,
                    "tool name '" + producer_tool + "' does not match [A-Za-z0-9_]+");
    if (value.is_null())
        throw Error(ErrorCode::invalid_value, "null is not a storable value");
    if (!all_numbers_finite(value))
        throw Error(ErrorCode::invalid_value,
                    "value contains a non-finite number and has no canonical form");

    std::size_t base_size = canonical_size(value);

    std::lock_guard lock(mutex_);
    if (capacity_bytes_ && total_bytes_ + base_size > *capacity_bytes_)
        throw Error(ErrorCode::capacity_exceeded,
                    "storing " + std::to_string(base_size) + " bytes would exceed capacity of " +
                        std::to_string(*capacity_bytes_) + " bytes");

    std::string base_path = fresh_base_path_locked(producer_tool);
    auto payload = std::make_shared<const Value>(std::move(value));
    auto now = std::chrono::steady_clock::now();

    Entry base;
    base.info = {base_path, kind_of(*payload), base_size, producer_tool, now, std::nullopt};
    base.payload = payload;
    entries_.emplace(base_path, std::move(base));
    total_bytes_ += base_size;

    if (payload->is_object()) {
        for (auto it = payload->cbegin(); it != payload->cend(); ++it) {
            if (!valid_subkey(it.key())) continue;
            const Value* field = &it.value();
            Entry child;
            child.info = {base_path + "/" + it.key(), kind_of(*field), canonical_size(*field),
                          producer_tool, now, base_path};
            // Aliasing share: the child points into the parent's payload.
            child.payload = std::shared_ptr<const Value>(payload, field);
            entries_.emplace(child.info.path, std::move(child));
        }
    }
    return base_path;
}

std::shared_ptr<const Value> SessionStore::get(const std::string& path) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(path);
    if (it == entries_.end())
        throw Error(ErrorCode::not_found, "no memory entry at path '" + path + "'");
    return it->second.payload;
}

bool SessionStore::contains(const std::string& path) const {
    std::lock_guard lock(mutex_);
    return entries_.contains(path);
}

std::vector<EntryInfo> SessionStore::list_entries(
    const std::optional<std::string>& prefix) const {
    std::lock_guard lock(mutex_);
    std::vector<EntryInfo> out;
    auto it = prefix ? entries_.lower_bound(*prefix) : entries_.begin();
    for (; it != entries_.end(); ++it) {
        if (prefix && it->first.compare(0, prefix->size(), *prefix) != 0) break;
        out.push_back(it->second.info);
    }
    return out;
}

std::size_t SessionStore::clear() {
    std::lock_guard lock(mutex_);
    std::size_t bases = 0;
    for (const auto& [path, entry] : entries_)
        if (!entry.info.parent) ++bases;
    entries_.clear();
    total_bytes_ = 0;
    return bases;
}

std::uint64_t SessionStore::total_bytes() const {
    std::lock_guard lock(mutex_);
    return total_bytes_;
}

}  // namespace toolmem
