#pragma once

// Arithmetic problems whose solution is a DAG of named quantities.

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rff/core/arith.hpp"
#include "rff/core/rational.hpp"

namespace rff::mathdag {

/// `name = value` or `name = lhs op rhs` over earlier names.
struct Definition {
    std::string name;
    bool literal = true;
    Rational value;
    Op op = Op::Add;
    std::string lhs;
    std::string rhs;

    [[nodiscard]] std::string text() const {
        if (literal) return name + " = " + to_string(value);
        return name + " = " + lhs + " " + symbol(op) + " " + rhs;
    }
};

inline Definition literal(std::string name, Rational value) {
    return Definition{std::move(name), true, std::move(value), Op::Add, {}, {}};
}

inline Definition binary(std::string name, std::string lhs, Op op, std::string rhs) {
    return Definition{std::move(name), false, 0, op, std::move(lhs), std::move(rhs)};
}

class ProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DagProblem {
    std::string id;
    std::vector<Definition> variables;
    std::string goal;
    int depth = 0;
    std::optional<Rational> answer;  ///< Ground truth, when known.
    std::string surface_text;

    [[nodiscard]] const Definition* find(const std::string& name) const {
        for (const auto& d : variables) {
            if (d.name == name) return &d;
        }
        return nullptr;
    }

    [[nodiscard]] const Definition& at(const std::string& name) const {
        if (const auto* d = find(name)) return *d;
        throw ProblemError("unknown variable '" + name + "'");
    }

    [[nodiscard]] std::size_t position(const std::string& name) const {
        for (std::size_t k = 0; k < variables.size(); ++k) {
            if (variables[k].name == name) return k;
        }
        throw ProblemError("unknown variable '" + name + "'");
    }

    /// True for word problems loaded without a structured DAG.
    [[nodiscard]] bool text_only() const { return variables.empty(); }
};

/// Names must be unique, references must point to earlier definitions and
/// the goal must be defined.
inline void validate(const DagProblem& p) {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t k = 0; k < p.variables.size(); ++k) {
        const auto& d = p.variables[k];
        if (d.name.empty()) throw ProblemError("empty variable name");
        if (!seen.emplace(d.name, k).second) throw ProblemError("duplicate variable '" + d.name + "'");
        if (d.literal) continue;
        for (const auto* ref : {&d.lhs, &d.rhs}) {
            if (!seen.contains(*ref)) {
                throw ProblemError("'" + d.name + "' refers to '" + *ref + "' before it is defined");
            }
        }
    }
    if (!p.text_only() && !seen.contains(p.goal)) throw ProblemError("goal '" + p.goal + "' is not defined");
}

/// Direct evaluation in definition order.
inline std::map<std::string, Rational> evaluate_all(const DagProblem& p) {
    std::map<std::string, Rational> values;
    for (const auto& d : p.variables) {
        if (d.literal) {
            values[d.name] = d.value;
            continue;
        }
        auto v = apply(d.op, values.at(d.lhs), values.at(d.rhs));
        if (!v) throw ProblemError("division by zero in '" + d.text() + "'");
        values[d.name] = *v;
    }
    return values;
}

inline Rational evaluate(const DagProblem& p) { return evaluate_all(p).at(p.goal); }

/// Variables on the longest dependency chain ending at `name`; a literal counts 1.
inline int depth_of(const DagProblem& p, const std::string& name) {
    std::unordered_map<std::string, int> depth;
    for (const auto& d : p.variables) {
        depth[d.name] = d.literal ? 1 : 1 + std::max(depth.at(d.lhs), depth.at(d.rhs));
        if (d.name == name) return depth[d.name];
    }
    throw ProblemError("unknown variable '" + name + "'");
}

/// Names `name` depends on, transitively, including itself.
inline std::vector<std::string> ancestors(const DagProblem& p, const std::string& name) {
    std::vector<bool> mark(p.variables.size(), false);
    mark[p.position(name)] = true;
    for (std::size_t k = p.variables.size(); k-- > 0;) {
        if (!mark[k] || p.variables[k].literal) continue;
        mark[p.position(p.variables[k].lhs)] = true;
        mark[p.position(p.variables[k].rhs)] = true;
    }
    std::vector<std::string> out;
    for (std::size_t k = 0; k < mark.size(); ++k) {
        if (mark[k]) out.push_back(p.variables[k].name);
    }
    return out;
}

/// Number of non-literal variables the goal needs, itself included.
inline int computed_steps(const DagProblem& p) {
    int n = 0;
    for (const auto& name : ancestors(p, p.goal)) n += p.at(name).literal ? 0 : 1;
    return n;
}

}  // namespace rff::mathdag
