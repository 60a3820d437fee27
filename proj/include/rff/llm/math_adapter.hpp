#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rff/core/adapter.hpp"
#include "rff/engines/rff_g.hpp"
#include "rff/mathdag/generator.hpp"
#include "rff/mathdag/oracle_adapter.hpp"
#include "rff/llm/session.hpp"

namespace rff::llm {

using mathdag::FactSet;
using mathdag::MathTarget;

/// The root target handed to RFF-G for a word problem.
inline MathTarget answer_target() { return MathTarget{"the answer to the question", ""}; }

/// "a = 2, b = 3", or "(none)".
inline std::string facts_text(const FactSet& facts) {
    if (facts.bindings.empty()) return "(none)";
    std::string out;
    for (const auto& [name, value] : facts.bindings) {
        if (!out.empty()) out += ", ";
        out += name + " = " + to_string(value);
    }
    return out;
}

/// Problem text for prompting: the stored surface text, or a rendering of
/// the structured problem.
inline std::string problem_text(const mathdag::DagProblem& p) {
    return p.surface_text.empty() ? mathdag::render_text(p) : p.surface_text;
}

/// Word-problem G/R/C/O backed by a chat model. Facts are named by the
/// model; a fact whose name is already bound keeps its first value.
class LlmMathAdapter {
public:
    using State = FactSet;
    using Target = MathTarget;
    static constexpr Capability capability = Capability::DagAccumulation;

    LlmMathAdapter(std::shared_ptr<ChatClient> client, std::string problem,
                   std::shared_ptr<const TemplateSet> templates = nullptr)
        : session_(std::move(client), std::move(templates), Domain::Math), problem_(std::move(problem)) {}

    [[nodiscard]] std::string state_key(const State& s) const { return s.key(); }
    [[nodiscard]] std::string target_key(const Target& t) const { return t.needed; }

    std::optional<BackwardProposal<Target>> last_step(const State& s, const Target& t, const SearchContext&) {
        auto ex = session_.ask(Role::LastStep, slots(s, t));
        auto need = parse_need_reply(ex.reply);
        if (need.rationale.empty()) throw ParseError("need without a rationale");
        std::string why = need.rationale;
        return BackwardProposal<Target>{Target{need.name, need.rationale}, std::move(why), ex.log};
    }

    std::optional<ForwardProposal<State>> forward_step(const State& s, const Target& t, const SearchContext&) {
        auto ex = session_.ask(Role::Forward, slots(s, t));
        auto fact = parse_fact_reply(ex.reply);
        State delta;
        delta.bindings.emplace(fact.name, fact.value);
        return ForwardProposal<State>{std::move(delta), fact.name + " = " + to_string(fact.value), ex.log};
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

    CheckVerdict state_check(const State& s, const Target& t, const SearchContext&) {
        if (s.contains(t.needed)) return {CheckStatus::Reached, ""};
        auto ex = session_.ask(Role::StateCheck, slots(s, t));
        return {parse_verdict(ex.reply) ? CheckStatus::Reached : CheckStatus::Open, ex.log};
    }

    Answer output(const State& s, const Target&) {
        auto ex = session_.ask(Role::Output, {{"background", problem_}, {"current", facts_text(s)}});
        return {to_string(parse_answer_number(ex.reply)), ex.log};
    }

    Session& session() { return session_; }
    [[nodiscard]] const std::string& problem() const { return problem_; }

private:
    [[nodiscard]] Slots slots(const State& s, const Target& t) const {
        return {{"background", problem_}, {"current", facts_text(s)}, {"target", t.needed}};
    }

    Session session_;
    std::string problem_;
};

inline SearchTrace solve_rff_g(LlmMathAdapter& adapter, const EngineConfig& cfg) {
    return run_rff_g(adapter, FactSet{}, answer_target(), cfg);
}

}  // namespace rff::llm
