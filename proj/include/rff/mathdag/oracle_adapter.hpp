#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/core/trace.hpp"
#include "rff/engines/rff_g.hpp"
#include "rff/mathdag/problem.hpp"

namespace rff::mathdag {

/// Established bindings. Only ever grows during a run.
struct FactSet {
    std::map<std::string, Rational> bindings;

    [[nodiscard]] bool contains(const std::string& name) const { return bindings.contains(name); }

    /// "a=2,b=3", sorted by name.
    [[nodiscard]] std::string key() const {
        std::string out;
        for (const auto& [name, value] : bindings) {
            if (!out.empty()) out += ',';
            out += name + "=" + to_string(value);
        }
        return out;
    }

    bool operator==(const FactSet&) const = default;
};

struct MathTarget {
    std::string needed;
    std::string rationale;
};

/// The problem's literal givens: what the text states outright.
inline FactSet initial_facts(const DagProblem& p) {
    FactSet facts;
    for (const auto& d : p.variables) {
        if (d.literal) facts.bindings.emplace(d.name, d.value);
    }
    return facts;
}

namespace detail {

inline bool ready(const FactSet& facts, const Definition& d) {
    return d.literal || (facts.contains(d.lhs) && facts.contains(d.rhs));
}

inline int unbound_below(const DagProblem& p, const FactSet& facts, const std::string& name) {
    int n = 0;
    for (const auto& a : ancestors(p, name)) n += (a != name && !facts.contains(a)) ? 1 : 0;
    return n;
}

}  // namespace detail

/// The quantity one step before `target`: the target itself when it can be
/// computed now, otherwise its unbound operand with the fewest unbound
/// dependencies of its own (ties by definition order). A target that is
/// already bound hands over to the goal. nullopt once the goal is bound.
inline std::optional<MathTarget> dag_last_step(const FactSet& facts, const MathTarget& target, const DagProblem& p) {
    const std::string anchor = facts.contains(target.needed) ? p.goal : target.needed;
    if (facts.contains(anchor)) return std::nullopt;
    const Definition& def = p.at(anchor);
    if (detail::ready(facts, def)) return MathTarget{anchor, def.text()};

    std::vector<std::string> open;
    for (const auto* dep : {&def.lhs, &def.rhs}) {
        if (!facts.contains(*dep) && (open.empty() || open.front() != *dep)) open.push_back(*dep);
    }
    std::string best;
    int best_score = 0;
    for (const auto& dep : open) {
        const int score = detail::unbound_below(p, facts, dep);
        if (best.empty() || score < best_score || (score == best_score && p.position(dep) < p.position(best))) {
            best = dep;
            best_score = score;
        }
    }
    return MathTarget{best, def.text()};
}

/// Binds `target.needed` when its operands are known, otherwise the first
/// (definition order) unbound ancestor that is ready. nullopt when stuck.
inline std::optional<std::pair<std::string, Rational>> dag_forward_step(const FactSet& facts, const MathTarget& target,
                                                                       const DagProblem& p) {
    if (facts.contains(target.needed)) return std::nullopt;
    for (const auto& name : ancestors(p, target.needed)) {
        if (facts.contains(name)) continue;
        const Definition& d = p.at(name);
        if (!detail::ready(facts, d)) continue;
        if (d.literal) return std::pair{name, d.value};
        auto v = apply(d.op, facts.bindings.at(d.lhs), facts.bindings.at(d.rhs));
        if (!v) throw ProblemError("division by zero in '" + d.text() + "'");
        return std::pair{name, *v};
    }
    return std::nullopt;
}

inline bool dag_state_check(const FactSet& facts, const std::string& goal) { return facts.contains(goal); }

/// Exact G/R/C/O over a structured problem.
class DagOracleAdapter {
public:
    using State = FactSet;
    using Target = MathTarget;
    static constexpr Capability capability = Capability::DagAccumulation;

    explicit DagOracleAdapter(const DagProblem& problem) : p_(problem) {}

    [[nodiscard]] std::string state_key(const State& s) const { return s.key(); }
    [[nodiscard]] std::string target_key(const Target& t) const { return t.needed; }

    std::optional<BackwardProposal<Target>> last_step(const State& s, const Target& t, const SearchContext&) const {
        auto next = dag_last_step(s, t, p_);
        if (!next) return std::nullopt;
        std::string why = next->rationale;
        return BackwardProposal<Target>{std::move(*next), std::move(why), ""};
    }

    std::optional<ForwardProposal<State>> forward_step(const State& s, const Target& t, const SearchContext&) const {
        std::optional<std::pair<std::string, Rational>> fact;
        try {
            fact = dag_forward_step(s, t, p_);
        } catch (const ProblemError& e) {
            throw AdapterError(e.what());
        }
        if (!fact) return std::nullopt;
        const Definition& d = p_.at(fact->first);
        std::string move = d.literal ? d.text() : d.text() + " = " + to_string(fact->second);
        State delta;
        delta.bindings.emplace(fact->first, fact->second);
        return ForwardProposal<State>{std::move(delta), std::move(move), ""};
    }

    [[nodiscard]] State merge(const State& a, const State& b) const {
        State out = a;
        for (const auto& [name, value] : b.bindings) out.bindings.emplace(name, value);
        return out;
    }

    [[nodiscard]] bool includes(const State& big, const State& small) const {
        for (const auto& [name, value] : small.bindings) {
            auto it = big.bindings.find(name);
            if (it == big.bindings.end() || it->second != value) return false;
        }
        return true;
    }

    CheckVerdict state_check(const State& s, const Target& t, const SearchContext&) const {
        return {dag_state_check(s, t.needed) ? CheckStatus::Reached : CheckStatus::Open, ""};
    }

    Answer output(const State& s, const Target& goal) const {
        auto it = s.bindings.find(goal.needed);
        if (it == s.bindings.end()) throw AdapterError("goal '" + goal.needed + "' is not established");
        return {to_string(it->second), ""};
    }

private:
    const DagProblem& p_;
};

inline SearchTrace solve_rff_g(const DagProblem& p, const EngineConfig& cfg) {
    DagOracleAdapter adapter(p);
    return run_rff_g(adapter, initial_facts(p), MathTarget{p.goal, "goal"}, cfg);
}

}  // namespace rff::mathdag
