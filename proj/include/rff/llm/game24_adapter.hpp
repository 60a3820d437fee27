#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/engines/rff_t.hpp"
#include "rff/game24/oracle_adapter.hpp"
#include "rff/game24/verify.hpp"
#include "rff/llm/session.hpp"

namespace rff::llm {

using game24::ArithMove;
using game24::Game24Frame;
using game24::Game24State;
using game24::Game24Target;
using game24::NumberSet;

/// Game of 24 G/R/C/V/O backed by a chat model. Every move the model
/// proposes is rechecked with exact arithmetic, and a path is only accepted
/// when its whole chain passes verify_chain.
class LlmGame24Adapter {
public:
    using State = Game24State;
    using Target = Game24Target;
    static constexpr Capability capability = Capability::TreeSearch;

    explicit LlmGame24Adapter(std::shared_ptr<ChatClient> client, std::shared_ptr<const TemplateSet> templates = nullptr,
                              Rational goal = 24)
        : session_(std::move(client), std::move(templates), Domain::Game24), goal_(std::move(goal)) {}

    [[nodiscard]] std::string state_key(const State& s) const { return s.numbers.key(); }
    [[nodiscard]] std::string target_key(const Target& t) const { return t.values.key(); }

    std::optional<BackwardProposal<Target>> last_step(const State& s, const Target& t, const SearchContext& ctx) {
        std::vector<std::string> failed;
        for (const auto& e : ctx.avoided()) failed.push_back(e.target);
        Slots slots{{"current", s.numbers.key()}, {"target", t.values.key()}, {"avoid", avoid_text(failed)}};
        auto [target, log] = session_.ask_checked<Target>(
            Role::LastStep, slots, [&](const std::string& reply, std::string& why) -> std::optional<Target> {
                auto parsed = parse_target_reply(reply);
                const auto& m = parsed.transition;
                if (!m.holds()) {
                    why = "the step " + m.str() + " is arithmetically wrong";
                    return std::nullopt;
                }
                auto expect = t.values.split(m.result, m.lhs, m.rhs);
                if (!expect || *expect != parsed.values) {
                    why = "applying " + m.str() + " to " + parsed.values.key() + " does not give " + t.values.key();
                    return std::nullopt;
                }
                for (const auto& f : failed) {
                    if (f == parsed.values.key()) {
                        why = "the target " + f + " already failed";
                        return std::nullopt;
                    }
                }
                return Target{parsed.values, m};
            });
        std::string transition = target.transition->str();
        return BackwardProposal<Target>{std::move(target), std::move(transition), std::move(log)};
    }

    std::optional<ForwardProposal<State>> forward_step(const State& s, const Target& t, const SearchContext& ctx) {
        std::vector<std::string> failed;
        const std::string tk = t.values.key();
        for (const auto& e : ctx.avoided()) {
            if (e.target == tk && !e.state.empty()) failed.push_back(e.state);
        }
        Slots slots{{"current", s.numbers.key()}, {"target", tk}, {"avoid", avoid_text(failed)}};
        auto [next, log] = session_.ask_checked<State>(
            Role::Forward, slots, [&](const std::string& reply, std::string& why) -> std::optional<State> {
                auto parsed = parse_move_reply(reply);
                const auto& m = parsed.move;
                if (!m.holds()) {
                    why = "the move " + m.str() + " is arithmetically wrong";
                    return std::nullopt;
                }
                auto after = s.numbers.replace(m.lhs, m.rhs, m.result);
                if (!after) {
                    why = "the move uses numbers that are not available in " + s.numbers.key();
                    return std::nullopt;
                }
                if (parsed.leaving && *parsed.leaving != *after) {
                    why = "after " + m.str() + " the numbers left are " + after->key() + ", not " + parsed.leaving->key();
                    return std::nullopt;
                }
                if (ctx.avoided().contains(AvoidEntry{after->key(), tk})) {
                    why = "the result " + after->key() + " already failed, choose a different move";
                    return std::nullopt;
                }
                return State{*after, m};
            });
        std::string move = next.move->str();
        return ForwardProposal<State>{std::move(next), std::move(move), std::move(log)};
    }

    CheckVerdict state_check(const State& s, const Target& t, const SearchContext&) {
        if (s.numbers == t.values) return {CheckStatus::Reached, ""};
        const bool one_move = s.numbers.size() == t.values.size() + 1;
        if (s.numbers.size() <= t.values.size()) return {CheckStatus::DeadEnd, ""};
        auto ex = session_.ask(Role::StateCheck, {{"current", s.numbers.key()}, {"target", t.values.key()}});
        const bool yes = parse_verdict(ex.reply);
        if (yes && one_move) return {CheckStatus::Reached, ex.log};
        return {one_move ? CheckStatus::DeadEnd : CheckStatus::Open, ex.log};
    }

    VerifyVerdict verify(std::span<const Game24Frame> path, const SearchContext&) {
        const int i = static_cast<int>(path.size()) - 1;
        const auto& original = path.front().state.payload.numbers;
        auto chain = game24::path_chain(path);
        std::string detail = "state does not meet its target";
        if (chain) {
            auto verdict = game24::verify_chain(*chain, original, goal_);
            if (verdict.valid) return {i, "", ""};
            detail = verdict.detail;
        }
        // The local check failed; the model only chooses where to go back to.
        auto ex = session_.ask(Role::Verify, {{"background", original.key()}, {"current", steps_text(path)}});
        auto reply = parse_verify_reply(ex.reply);
        return {clamp_backtrack(reply.valid ? std::nullopt : reply.step, i), detail, ex.log};
    }

    Answer output(std::span<const Game24Frame> path) const {
        auto chain = game24::path_chain(path);
        const auto& original = path.front().state.payload.numbers;
        if (!chain || !game24::verify_chain(*chain, original, goal_).valid) {
            throw AdapterError("output called on an unverified path");
        }
        return {game24::format_solution(*chain, original), ""};
    }

    Session& session() { return session_; }
    [[nodiscard]] const Rational& goal() const { return goal_; }

private:
    static std::string avoid_text(const std::vector<std::string>& failed) {
        if (failed.empty()) return "(none)";
        std::string out;
        for (const auto& f : failed) out += (out.empty() ? "" : "\n") + ("- " + f);
        return out;
    }

    /// Numbered forward moves, the connecting move, then the backward
    /// transitions, as far as they exist.
    static std::string steps_text(std::span<const Game24Frame> path) {
        std::vector<std::string> lines;
        for (std::size_t k = 1; k < path.size(); ++k) {
            if (path[k].state.payload.move) lines.push_back(path[k].state.payload.move->str());
        }
        const auto& last = path.back();
        if (auto link = game24::connecting_move(last.state.payload.numbers, last.target.payload.values)) {
            lines.push_back(link->str());
        }
        for (std::size_t k = path.size(); k-- > 1;) {
            if (path[k].target.payload.transition) lines.push_back(path[k].target.payload.transition->str());
        }
        std::string out;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            out += (k ? "\n" : "") + std::to_string(k + 1) + ". " + lines[k];
        }
        return out.empty() ? "(no steps)" : out;
    }

    Session session_;
    Rational goal_;
};

inline SearchTrace solve_rff_t(LlmGame24Adapter& adapter, const NumberSet& numbers, const EngineConfig& cfg) {
    return run_rff_t(adapter, Game24State{numbers, std::nullopt},
                     Game24Target{NumberSet(std::vector<Rational>{adapter.goal()}), std::nullopt}, cfg);
}

}  // namespace rff::llm
