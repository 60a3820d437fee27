#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rff/mathdag/problem.hpp"

namespace rff::mathdag {

inline constexpr const char* kTextTemplateVersion = "dag-text/1";

/// Word-problem rendering with fixed sentence templates (see kTextTemplateVersion).
inline std::string render_text(const DagProblem& p) {
    std::string out;
    for (const auto& d : p.variables) {
        if (!out.empty()) out += ' ';
        if (d.literal) {
            out += d.name + " is " + to_string(d.value) + ".";
            continue;
        }
        const char* verb = d.op == Op::Add ? "plus" : d.op == Op::Sub ? "minus" : d.op == Op::Mul ? "times" : "divided by";
        out += d.name + " is " + d.lhs + " " + verb + " " + d.rhs + ".";
    }
    out += " What is " + p.goal + "?";
    return out;
}

namespace detail {

class DagBuilder {
public:
    explicit DagBuilder(std::uint64_t seed) : rng_(seed) {}

    std::string lit() {
        Rational v(static_cast<int>(1 + rng_() % 9));
        std::string name = fresh();
        values_.emplace(name, v);
        vars_.push_back(literal(name, v));
        return name;
    }

    /// Binary node; division only when the quotient is a whole number.
    std::string node(const std::string& lhs, const std::string& rhs) {
        static constexpr Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div};
        Op op = ops[rng_() % 4];
        const Rational& a = values_.at(lhs);
        const Rational& b = values_.at(rhs);
        if (op == Op::Div && (b == 0 || boost::multiprecision::denominator(Rational(a / b)) != 1)) op = Op::Mul;
        std::string name = fresh();
        values_.emplace(name, *apply(op, a, b));
        vars_.push_back(binary(name, lhs, op, rhs));
        return name;
    }

    /// Two fresh literals combined; sequenced so the draw order is fixed.
    std::string leaf_pair() {
        std::string x = lit();
        std::string y = lit();
        return node(x, y);
    }

    bool coin() { return rng_() % 2 == 0; }
    std::uint64_t draw(std::uint64_t n) { return rng_() % n; }

    std::vector<Definition> take() { return std::move(vars_); }

private:
    std::string fresh() { return "q" + std::to_string(++counter_); }

    std::mt19937_64 rng_;
    std::vector<Definition> vars_;
    std::map<std::string, Rational> values_;
    int counter_ = 0;
};

}  // namespace detail

/// Deterministic in `seed`. The goal sits at the end of a dependency chain of
/// exactly `depth` variables (a literal goal has depth 1). For depth >= 3 one
/// or two side computations feed the chain, so the goal needs `depth - 1`
/// or `depth` computed values. `width - 1` unrelated computations are mixed in.
inline DagProblem generate_problem(std::uint64_t seed, int depth, int width) {
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    if (width < 1) throw std::invalid_argument("width must be >= 1");
    detail::DagBuilder b(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(depth * 131 + width));

    auto distractor = [&] {
        std::string x = b.leaf_pair();
        if (b.coin()) {
            std::string y = b.lit();
            b.node(x, y);
        }
    };
    // Place each distractor before or after the main chain.
    std::vector<bool> before;
    for (int k = 1; k < width; ++k) before.push_back(b.coin());
    for (bool first : before) {
        if (first) distractor();
    }

    std::string goal;
    if (depth == 1) {
        goal = b.lit();
    } else {
        std::set<int> side_levels;
        if (depth >= 3) {
            const int sides = depth >= 4 ? 1 + static_cast<int>(b.draw(2)) : 1;
            while (static_cast<int>(side_levels.size()) < sides) {
                side_levels.insert(3 + static_cast<int>(b.draw(static_cast<std::uint64_t>(depth - 2))));
            }
        }
        goal = b.leaf_pair();
        for (int level = 3; level <= depth; ++level) {
            std::string other = side_levels.contains(level) ? b.leaf_pair() : b.lit();
            goal = b.coin() ? b.node(goal, other) : b.node(other, goal);
        }
    }
    for (bool first : before) {
        if (!first) distractor();
    }

    DagProblem p;
    p.id = "dag-s" + std::to_string(seed) + "-d" + std::to_string(depth) + "-w" + std::to_string(width);
    p.variables = b.take();
    p.goal = goal;
    p.depth = depth_of(p, goal);
    p.answer = evaluate(p);
    p.surface_text = render_text(p);
    return p;
}

}  // namespace rff::mathdag
