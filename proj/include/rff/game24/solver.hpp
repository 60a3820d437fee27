#pragma once

// Exhaustive solvability oracle and forward reachability for the Game of 24.
//
// brute_force_solvable enumerates expression trees by recursive splits of the
// leaf positions (every binary tree is a split of its leaves into a left and a
// right subtree), so it shares no code path with the pairwise-reduction
// search used by the oracle adapter.

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "rff/game24/number_set.hpp"

namespace rff::game24 {

struct Solvability {
    bool solvable = false;
    std::string witness;  ///< Fully parenthesized expression when solvable.
};

namespace detail {

struct SplitNode {
    std::uint32_t left_mask = 0;
    Rational left;
    Op op = Op::Add;
    std::uint32_t right_mask = 0;
    Rational right;
    bool leaf = true;
};

using ValueTable = std::map<Rational, SplitNode>;

inline std::string render(const std::vector<ValueTable>& tables, std::uint32_t mask, const Rational& value) {
    const SplitNode& node = tables[mask].at(value);
    if (node.leaf) return to_string(value);
    return "(" + render(tables, node.left_mask, node.left) + symbol(node.op) +
           render(tables, node.right_mask, node.right) + ")";
}

}  // namespace detail

/// True iff some binary expression tree over the multiset, using + - * / in
/// exact arithmetic and each number exactly once, evaluates to `goal`.
/// The witness is the first tree found in the fixed order: leaf masks
/// ascending, left submask descending, then + - * /.
inline Solvability brute_force_solvable(const NumberSet& numbers, const Rational& goal = 24) {
    const std::size_t n = numbers.size();
    if (n < 1 || n > 6) throw std::invalid_argument("brute_force_solvable supports 1..6 numbers");
    if (n == 1) {
        if (numbers[0] == goal) return {true, to_string(goal)};
        return {};
    }
    const std::uint32_t full = (1u << n) - 1;
    std::vector<detail::ValueTable> tables(full + 1);
    for (std::size_t i = 0; i < n; ++i) tables[1u << i].emplace(numbers[i], detail::SplitNode{});

    for (std::uint32_t mask = 1; mask < full; ++mask) {
        if (std::popcount(mask) < 2) continue;
        auto& table = tables[mask];
        for (std::uint32_t left = (mask - 1) & mask; left != 0; left = (left - 1) & mask) {
            const std::uint32_t right = mask ^ left;
            for (const auto& [a, na] : tables[left]) {
                for (const auto& [b, nb] : tables[right]) {
                    for (Op op : kOps) {
                        auto value = apply(op, a, b);
                        if (!value || table.contains(*value)) continue;
                        table.emplace(*value, detail::SplitNode{left, a, op, right, b, false});
                    }
                }
            }
        }
    }

    // At the root only `goal` matters: solve for the right operand and look it up.
    for (std::uint32_t left = (full - 1) & full; left != 0; left = (left - 1) & full) {
        const std::uint32_t right = full ^ left;
        for (const auto& [a, na] : tables[left]) {
            for (Op op : kOps) {
                std::optional<Rational> b;
                switch (op) {
                    case Op::Add: b = goal - a; break;
                    case Op::Sub: b = a - goal; break;
                    case Op::Mul: if (a != 0) b = goal / a; break;
                    case Op::Div: if (goal != 0) b = a / goal; break;
                }
                if (!b || !tables[right].contains(*b)) continue;
                auto value = apply(op, a, *b);
                if (!value || *value != goal) continue;
                return {true, "(" + detail::render(tables, left, a) + symbol(op) +
                                  detail::render(tables, right, *b) + ")"};
            }
        }
    }
    return {};
}

inline NumberSet add_redundant_one(const NumberSet& numbers) { return numbers.with(Rational(1)); }

/// Keys of every multiset reachable from `from` by exactly `moves` forward moves.
inline std::unordered_set<std::string> reachable_keys(const NumberSet& from, std::size_t moves) {
    std::map<std::string, NumberSet> frontier{{from.key(), from}};
    for (std::size_t m = 0; m < moves; ++m) {
        std::map<std::string, NumberSet> next;
        for (const auto& [key, state] : frontier) {
            for (auto& succ : successors(state)) {
                auto k = succ.state.key();
                next.try_emplace(std::move(k), std::move(succ.state));
            }
        }
        frontier = std::move(next);
    }
    std::unordered_set<std::string> keys;
    for (auto& [key, state] : frontier) keys.insert(key);
    return keys;
}

/// True iff `to` can be produced from `from` by forward moves alone.
inline bool reachable(const NumberSet& from, const NumberSet& to) {
    if (to.size() > from.size() || to.empty()) return false;
    if (to.size() == from.size()) return to == from;
    return reachable_keys(from, from.size() - to.size()).contains(to.key());
}

}  // namespace rff::game24
