#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace rff {

/// A failed (state, target) attempt, stored by canonical key.
struct AvoidEntry {
    std::string state;
    std::string target;

    auto operator<=>(const AvoidEntry&) const = default;
};

using AvoidSlice = std::set<AvoidEntry>;

/// Per-depth record of failed attempts (A_0 ... A_i).
///
/// Slice j holds the children of frame j that led nowhere; the forward step
/// that expands frame j must not reproduce any of them.
class AvoidSet {
public:
    void record(int depth, AvoidEntry entry) { slices_[depth].insert(std::move(entry)); }

    [[nodiscard]] bool contains(int depth, const AvoidEntry& entry) const {
        auto it = slices_.find(depth);
        return it != slices_.end() && it->second.contains(entry);
    }

    [[nodiscard]] bool contains(int depth, std::string_view state, std::string_view target) const {
        return contains(depth, AvoidEntry{std::string(state), std::string(target)});
    }

    [[nodiscard]] std::size_t size(int depth) const {
        auto it = slices_.find(depth);
        return it == slices_.end() ? 0 : it->second.size();
    }

    [[nodiscard]] const AvoidSlice& slice(int depth) const {
        static const AvoidSlice empty;
        auto it = slices_.find(depth);
        return it == slices_.end() ? empty : it->second;
    }

    /// Drops slice `depth` and everything deeper.
    void clear_from(int depth) { slices_.erase(slices_.lower_bound(depth), slices_.end()); }

    /// Drops every slice strictly deeper than `depth`.
    void clear_deeper(int depth) { slices_.erase(slices_.upper_bound(depth), slices_.end()); }

    [[nodiscard]] bool empty() const { return slices_.empty(); }

private:
    std::map<int, AvoidSlice> slices_;
};

inline bool avoid_contains(const AvoidSet& avoid, int depth, std::string_view state_key,
                           std::string_view target_key) {
    return avoid.contains(depth, state_key, target_key);
}

/// Keyed through the adapter's canonicalization so semantically equal attempts collide.
template <class Adapter, class State, class Target>
bool avoid_contains(const AvoidSet& avoid, int depth, const Adapter& adapter, const State& state,
                    const Target& target) {
    return avoid.contains(depth, adapter.state_key(state), adapter.target_key(target));
}

}  // namespace rff
