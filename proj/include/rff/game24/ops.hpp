#pragma once

// Deterministic Game of 24 reasoning steps: backward decomposition of a
// target, one forward move toward a target, and the one-move state check.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rff/core/avoid_set.hpp"
#include "rff/game24/number_set.hpp"
#include "rff/game24/solver.hpp"

namespace rff::game24 {

/// Memo of reachable_keys, safe to share between threads.
class ReachCache {
public:
    using Keys = std::unordered_set<std::string>;

    std::shared_ptr<const Keys> get(const NumberSet& from, std::size_t moves) {
        std::string key = from.key() + "#" + std::to_string(moves);
        {
            std::lock_guard lock(mu_);
            if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        }
        auto keys = std::make_shared<const Keys>(reachable_keys(from, moves));
        std::lock_guard lock(mu_);
        return memo_.try_emplace(std::move(key), std::move(keys)).first->second;
    }

    /// True iff `to` is obtainable from `from` using forward moves only.
    bool reachable(const NumberSet& from, const NumberSet& to) {
        if (to.empty() || to.size() > from.size()) return false;
        if (to.size() == from.size()) return to == from;
        return get(from, from.size() - to.size())->contains(to.key());
    }

private:
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const Keys>> memo_;
};

class NoCandidates : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Values available to backward decomposition: the card range 1..13, the
/// current numbers and everything one move away from them.
inline std::vector<Rational> candidate_pool(const NumberSet& current) {
    std::set<Rational> pool;
    for (int v = 1; v <= 13; ++v) pool.insert(Rational(v));
    for (const auto& v : current.values()) pool.insert(v);
    for (const auto& s : successors(current)) pool.insert(s.move.result);
    return {pool.begin(), pool.end()};
}

namespace detail {

/// Every way of writing `v` as `a op b` with one operand drawn from the pool,
/// in the order: products, sums, differences, quotients.
inline std::vector<ArithMove> decompositions(const Rational& v, const std::vector<Rational>& pool) {
    std::vector<ArithMove> out;
    auto sorted_pair = [](Rational a, Rational b, Op op, const Rational& r) {
        if (b < a) std::swap(a, b);
        return ArithMove{std::move(a), std::move(b), op, r};
    };
    for (const auto& p : pool) {
        if (p != 0) out.push_back(sorted_pair(p, v / p, Op::Mul, v));
    }
    for (const auto& p : pool) out.push_back(sorted_pair(p, v - p, Op::Add, v));
    for (const auto& p : pool) {
        out.push_back({p, p - v, Op::Sub, v});
        out.push_back({v + p, p, Op::Sub, v});
    }
    if (v != 0) {
        for (const auto& p : pool) {
            if (p != 0) out.push_back({p, p / v, Op::Div, v});
            if (p != 0) out.push_back({v * p, p, Op::Div, v});
        }
    }
    return out;
}

}  // namespace detail

/// Pre-targets one backward step before `target`: one value v replaced by
/// {a, b} with a op b = v. Candidates the current numbers can actually reach
/// come first, then those whose members are in or one move from `current`.
/// Within a rank the enumeration order is kept. At most `width` results.
inline std::vector<Game24Target> backward_candidates(const NumberSet& current, const Game24Target& target,
                                                     int width, ReachCache* cache = nullptr) {
    if (target.values.empty()) throw std::invalid_argument("backward_candidates: empty target");
    ReachCache local;
    ReachCache& reach = cache ? *cache : local;

    const auto pool = candidate_pool(current);
    std::set<Rational> near(current.values().begin(), current.values().end());
    for (const auto& s : successors(current)) near.insert(s.move.result);

    struct Ranked {
        std::tuple<int, int, std::size_t> score;
        Game24Target target;
    };
    std::vector<Ranked> ranked;
    std::unordered_set<std::string> seen;
    const auto& values = target.values.values();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0 && values[i] == values[i - 1]) continue;
        for (auto& move : detail::decompositions(values[i], pool)) {
            auto pre = target.values.split(values[i], move.lhs, move.rhs);
            if (!pre) continue;
            auto key = pre->key();
            if (!seen.insert(key).second) continue;
            const int reachable = reach.reachable(current, *pre) ? 1 : 0;
            const int close = (near.contains(move.lhs) ? 1 : 0) + (near.contains(move.rhs) ? 1 : 0);
            ranked.push_back({{reachable, close, pre->overlap(current)}, Game24Target{std::move(*pre), move}});
        }
    }
    if (ranked.empty()) throw NoCandidates("no decomposition of " + target.values.key());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked& a, const Ranked& b) { return a.score > b.score; });
    std::vector<Game24Target> out;
    for (auto& r : ranked) {
        if (static_cast<int>(out.size()) >= width) break;
        out.push_back(std::move(r.target));
    }
    return out;
}

struct ForwardMove {
    NumberSet next;
    ArithMove move;
};

/// One move on `current` toward `target`, skipping (next, target) pairs in
/// `avoid`. Prefers moves after which the target is still reachable, then
/// larger overlap with the target; ties go to the canonical move order.
/// nullopt when every legal move is avoided.
inline std::optional<ForwardMove> forward_step(const NumberSet& current, const NumberSet& target,
                                               const AvoidSlice& avoid = {}, ReachCache* cache = nullptr) {
    ReachCache local;
    ReachCache& reach = cache ? *cache : local;
    const std::string target_key = target.key();
    std::optional<ForwardMove> best;
    std::pair<int, std::size_t> best_score{-1, 0};
    for (auto& s : successors(current)) {
        if (avoid.contains(AvoidEntry{s.state.key(), target_key})) continue;
        std::pair<int, std::size_t> score{reach.reachable(s.state, target) ? 1 : 0, s.state.overlap(target)};
        if (!best || score > best_score) {
            best_score = score;
            best = ForwardMove{std::move(s.state), s.move};
        }
    }
    return best;
}

/// First move (canonical order) that turns `current` into `target`.
inline std::optional<ArithMove> connecting_move(const NumberSet& current, const NumberSet& target) {
    if (current.size() != target.size() + 1) return std::nullopt;
    for (const auto& s : successors(current)) {
        if (s.state == target) return s.move;
    }
    return std::nullopt;
}

/// True iff `current` equals `target` or one move turns it into `target`.
inline bool state_check(const NumberSet& current, const NumberSet& target) {
    return current == target || connecting_move(current, target).has_value();
}

}  // namespace rff::game24
