#pragma once

// Chain verification, solution formatting and a small infix expression
// parser for the Game of 24.

#include <cctype>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rff/game24/number_set.hpp"

namespace rff::game24 {

struct ChainVerdict {
    bool valid = false;
    int step = 0;  ///< Deepest offending step (1-based) when invalid; 0 for an empty chain.
    std::string detail;
};

/// Replays `chain` over `original`. Valid iff every step is exact arithmetic
/// over live values, every original number is consumed exactly once and the
/// only value left is `goal`.
inline ChainVerdict verify_chain(const std::vector<ArithMove>& chain, const NumberSet& original,
                                 const Rational& goal = 24) {
    NumberSet pool = original;
    int bad = 0;
    std::string why;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const ArithMove& m = chain[k];
        const int step = static_cast<int>(k) + 1;
        if (!m.holds()) {
            bad = step;
            why = "step " + std::to_string(step) + " is false: " + m.str();
        }
        auto next = pool.replace(m.lhs, m.rhs, m.result);
        if (!next) {
            bad = step;
            why = "step " + std::to_string(step) + " uses a number that is not available: " + m.str();
            continue;
        }
        pool = std::move(*next);
    }
    if (bad != 0) return {false, bad, why};
    if (pool.size() == 1 && pool[0] == goal) return {true, static_cast<int>(chain.size()), ""};
    const int last = static_cast<int>(chain.size());
    if (pool.size() > 1) return {false, last, "numbers left unused: " + pool.key()};
    return {false, last, "result is " + pool.key() + ", not " + to_string(goal)};
}

namespace detail {

struct Expr {
    Rational value;
    char op = 0;  ///< 0 for a leaf.
    std::shared_ptr<const Expr> lhs, rhs;
};
using ExprPtr = std::shared_ptr<const Expr>;

constexpr int precedence(char op) { return op == '+' || op == '-' ? 1 : op == '*' || op == '/' ? 2 : 3; }

inline std::string print(const ExprPtr& e) {
    if (e->op == 0) {
        std::string s = to_string(e->value);
        if (e->value < 0 || boost::multiprecision::denominator(e->value) != 1) return "(" + s + ")";
        return s;
    }
    const int p = precedence(e->op);
    std::string left = print(e->lhs);
    if (precedence(e->lhs->op) < p) left = "(" + left + ")";
    std::string right = print(e->rhs);
    const int rp = precedence(e->rhs->op);
    if (rp < p || (rp == p && (e->op == '-' || e->op == '/'))) right = "(" + right + ")";
    return left + e->op + right;
}

}  // namespace detail

/// Folds a valid chain into one infix expression with minimal parentheses,
/// e.g. [12+12=24, 2-1=1, 24*1=24] on {1,2,12,12} gives "(12+12)*(2-1)".
inline std::string format_solution(const std::vector<ArithMove>& chain, const NumberSet& original) {
    using detail::Expr;
    using detail::ExprPtr;
    std::vector<ExprPtr> live;
    for (const auto& v : original.values()) live.push_back(std::make_shared<const Expr>(Expr{v, 0, {}, {}}));
    auto take = [&](const Rational& v) {
        for (auto it = live.begin(); it != live.end(); ++it) {
            if ((*it)->value == v) {
                ExprPtr e = *it;
                live.erase(it);
                return e;
            }
        }
        throw std::invalid_argument("format_solution: " + to_string(v) + " is not available");
    };
    for (const auto& m : chain) {
        ExprPtr l = take(m.lhs);
        ExprPtr r = take(m.rhs);
        live.push_back(std::make_shared<const Expr>(Expr{m.result, symbol(m.op), l, r}));
    }
    if (live.size() != 1) throw std::invalid_argument("format_solution: chain does not use every number");
    return detail::print(live.front());
}

class ExpressionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ParsedExpression {
    Rational value;
    NumberSet leaves;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : s_(text) {}

    ParsedExpression parse() {
        Rational v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return {v, NumberSet(std::move(leaves_))};
    }

private:
    Rational sum() {
        Rational v = product();
        while (true) {
            skip();
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }

    Rational product() {
        Rational v = unary();
        while (true) {
            skip();
            if (eat('*') || eat('x') || eat('X') || eat_str("\xC3\x97")) {
                v *= unary();
            } else if (eat('/') || eat_str("\xC3\xB7")) {
                Rational d = unary();
                if (d == 0) fail("division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    Rational unary() {
        skip();
        if (eat('-')) return -unary();
        if (eat('(')) {
            Rational v = sum();
            skip();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a number");
        Rational v(BigInt(std::string(s_.substr(start, pos_ - start))));
        leaves_.push_back(v);
        return v;
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool eat_str(std::string_view t) {
        if (s_.substr(pos_, t.size()) == t) {
            pos_ += t.size();
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ExpressionError("bad expression at " + std::to_string(pos_) + ": " + what);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::vector<Rational> leaves_;
};

}  // namespace detail

/// Parses an infix expression over integer literals. Accepts x, X and the
/// Unicode multiplication and division signs.
inline ParsedExpression parse_expression(std::string_view text) { return detail::ExprParser(text).parse(); }

/// True iff `expr` uses exactly the multiset `numbers` and evaluates to `goal`.
inline bool verify_expression(std::string_view expr, const NumberSet& numbers, const Rational& goal = 24) {
    try {
        auto parsed = parse_expression(expr);
        return parsed.value == goal && parsed.leaves == numbers;
    } catch (const ExpressionError&) {
        return false;
    }
}

}  // namespace rff::game24
