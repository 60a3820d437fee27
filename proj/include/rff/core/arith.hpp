#pragma once

#include <optional>

#include "rff/core/rational.hpp"

namespace rff {

enum class Op : char { Add = '+', Sub = '-', Mul = '*', Div = '/' };

inline constexpr Op kOps[] = {Op::Add, Op::Sub, Op::Mul, Op::Div};

constexpr char symbol(Op op) { return static_cast<char>(op); }

inline std::optional<Op> parse_op(char c) {
    switch (c) {
        case '+': return Op::Add;
        case '-': return Op::Sub;
        case '*': case 'x': case 'X': return Op::Mul;
        case '/': return Op::Div;
        default: return std::nullopt;
    }
}

/// Exact `lhs op rhs`; nullopt for division by zero.
inline std::optional<Rational> apply(Op op, const Rational& lhs, const Rational& rhs) {
    switch (op) {
        case Op::Add: return lhs + rhs;
        case Op::Sub: return lhs - rhs;
        case Op::Mul: return lhs * rhs;
        case Op::Div:
            if (rhs == 0) return std::nullopt;
            return lhs / rhs;
    }
    return std::nullopt;
}

}  // namespace rff
