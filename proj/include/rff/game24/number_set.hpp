#pragma once

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rff/core/arith.hpp"
#include "rff/core/rational.hpp"

namespace rff::game24 {

struct ArithMove {
    Rational lhs;
    Rational rhs;
    Op op = Op::Add;
    Rational result;

    /// result == lhs op rhs exactly (and no division by zero).
    [[nodiscard]] bool holds() const {
        auto value = apply(op, lhs, rhs);
        return value && *value == result;
    }

    [[nodiscard]] std::string str() const {
        return to_string(lhs) + symbol(op) + to_string(rhs) + "=" + to_string(result);
    }

    bool operator==(const ArithMove&) const = default;
};

/// Builds the move for `lhs op rhs`, or nullopt when undefined.
inline std::optional<ArithMove> make_move(const Rational& lhs, Op op, const Rational& rhs) {
    auto value = apply(op, lhs, rhs);
    if (!value) return std::nullopt;
    return ArithMove{lhs, rhs, op, *value};
}

/// Multiset of exact rationals, kept sorted so equal multisets compare and
/// print identically.
class NumberSet {
public:
    NumberSet() = default;
    NumberSet(std::initializer_list<int> values) {
        for (int v : values) values_.emplace_back(v);
        normalize();
    }
    explicit NumberSet(std::vector<Rational> values) : values_(std::move(values)) { normalize(); }

    [[nodiscard]] const std::vector<Rational>& values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }
    [[nodiscard]] const Rational& operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] std::size_t count(const Rational& v) const {
        auto [lo, hi] = std::equal_range(values_.begin(), values_.end(), v);
        return static_cast<std::size_t>(hi - lo);
    }
    [[nodiscard]] bool contains(const Rational& v) const { return count(v) > 0; }

    /// Space-separated canonical key, e.g. "1 2 12 12".
    [[nodiscard]] std::string key() const {
        std::string out;
        for (const auto& v : values_) {
            if (!out.empty()) out += ' ';
            out += to_string(v);
        }
        return out;
    }

    /// Copy with one occurrence of each of `a` and `b` removed and `c` added.
    /// nullopt when `a`/`b` are not both present (with multiplicity).
    [[nodiscard]] std::optional<NumberSet> replace(const Rational& a, const Rational& b, const Rational& c) const {
        std::vector<Rational> out = values_;
        for (const Rational* v : {&a, &b}) {
            auto it = std::lower_bound(out.begin(), out.end(), *v);
            if (it == out.end() || *it != *v) return std::nullopt;
            out.erase(it);
        }
        out.insert(std::upper_bound(out.begin(), out.end(), c), c);
        NumberSet result;
        result.values_ = std::move(out);
        return result;
    }

    /// Copy with one occurrence of `v` replaced by the pair {a, b}.
    [[nodiscard]] std::optional<NumberSet> split(const Rational& v, const Rational& a, const Rational& b) const {
        std::vector<Rational> out = values_;
        auto it = std::lower_bound(out.begin(), out.end(), v);
        if (it == out.end() || *it != v) return std::nullopt;
        out.erase(it);
        out.push_back(a);
        out.push_back(b);
        return NumberSet(std::move(out));
    }

    [[nodiscard]] NumberSet with(const Rational& v) const {
        std::vector<Rational> out = values_;
        out.insert(std::upper_bound(out.begin(), out.end(), v), v);
        NumberSet result;
        result.values_ = std::move(out);
        return result;
    }

    /// Multiset intersection size.
    [[nodiscard]] std::size_t overlap(const NumberSet& other) const {
        std::size_t i = 0, j = 0, n = 0;
        while (i < values_.size() && j < other.values_.size()) {
            if (values_[i] < other.values_[j]) ++i;
            else if (other.values_[j] < values_[i]) ++j;
            else { ++n; ++i; ++j; }
        }
        return n;
    }

    bool operator==(const NumberSet&) const = default;

private:
    void normalize() { std::sort(values_.begin(), values_.end()); }

    std::vector<Rational> values_;
};

inline NumberSet canonicalize(const NumberSet& s) { return NumberSet(s.values()); }

/// Parses whitespace-separated rationals ("4 6 1 1", "1/3 8").
inline NumberSet parse_numbers(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::vector<Rational> values;
    std::string token;
    while (in >> token) {
        auto v = parse_rational(token);
        if (!v) throw std::invalid_argument("not a number: '" + token + "'");
        values.push_back(*v);
    }
    return NumberSet(std::move(values));
}

/// A legal forward move on `from` together with the state it produces.
struct Successor {
    ArithMove move;
    NumberSet state;
};

/// Every legal single move on `s`, in canonical order: index pairs (i < j)
/// over the sorted multiset (repeated value pairs skipped), then
/// a+b, a-b, b-a, a*b, a/b, b/a. Undefined divisions are omitted.
inline std::vector<Successor> successors(const NumberSet& s) {
    std::vector<Successor> out;
    const auto& v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0 && v[i] == v[i - 1]) continue;
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (j > i + 1 && v[j] == v[j - 1]) continue;
            const Rational& a = v[i];
            const Rational& b = v[j];
            auto emit = [&](const Rational& lhs, Op op, const Rational& rhs) {
                auto move = make_move(lhs, op, rhs);
                if (!move) return;
                auto next = s.replace(lhs, rhs, move->result);
                out.push_back({*move, std::move(*next)});
            };
            emit(a, Op::Add, b);
            emit(a, Op::Sub, b);
            if (a != b) emit(b, Op::Sub, a);
            emit(a, Op::Mul, b);
            emit(a, Op::Div, b);
            if (a != b) emit(b, Op::Div, a);
        }
    }
    return out;
}

/// The target state of the game: a multiset to reach plus the backward step
/// that produced it (absent for the root goal).
struct Game24Target {
    NumberSet values;
    std::optional<ArithMove> transition;

    bool operator==(const Game24Target&) const = default;
};

/// Forward state: the multiset plus the move that produced it.
struct Game24State {
    NumberSet numbers;
    std::optional<ArithMove> move;

    bool operator==(const Game24State&) const = default;
};

}  // namespace rff::game24
