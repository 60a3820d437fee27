#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/core/hash.hpp"
#include "rff/core/trace.hpp"
#include "rff/engines/rff_t.hpp"
#include "rff/game24/number_set.hpp"
#include "rff/game24/ops.hpp"
#include "rff/game24/verify.hpp"

namespace rff::game24 {

using Game24Frame = Frame<Game24State, Game24Target>;

/// Guided ranks backward and forward candidates as in ops.hpp. Shuffled
/// permutes backward candidates and picks forward moves at random (seeded),
/// which makes the search wander and backtrack; used to exercise the engine.
enum class Ranking { Guided, Shuffled };

/// The full forward-then-backward move chain for a path whose last state
/// meets its target: forward moves S_0..S_i, the connecting move (if any),
/// then the backward transitions T_i..T_1 replayed forward.
inline std::optional<std::vector<ArithMove>> path_chain(std::span<const Game24Frame> path) {
    std::vector<ArithMove> chain;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (!path[k].state.payload.move) return std::nullopt;
        chain.push_back(*path[k].state.payload.move);
    }
    const auto& last = path.back();
    if (last.state.payload.numbers != last.target.payload.values) {
        auto link = connecting_move(last.state.payload.numbers, last.target.payload.values);
        if (!link) return std::nullopt;
        chain.push_back(*link);
    }
    for (std::size_t k = path.size(); k-- > 1;) {
        if (!path[k].target.payload.transition) return std::nullopt;
        chain.push_back(*path[k].target.payload.transition);
    }
    return chain;
}

/// Exact, deterministic G/R/C/V/O for the Game of 24.
class OracleAdapter {
public:
    using State = Game24State;
    using Target = Game24Target;
    static constexpr Capability capability = Capability::TreeSearch;

    explicit OracleAdapter(Ranking ranking = Ranking::Guided)
        : ranking_(ranking), reach_(std::make_shared<ReachCache>()) {}

    [[nodiscard]] std::string state_key(const State& s) const { return s.numbers.key(); }
    [[nodiscard]] std::string target_key(const Target& t) const { return t.values.key(); }

    std::optional<BackwardProposal<Target>> last_step(const State& s, const Target& t, const SearchContext& ctx) {
        std::vector<Game24Target> candidates;
        try {
            candidates = backward_candidates(s.numbers, t, ranking_ == Ranking::Guided ? ctx.config.width : 1 << 20,
                                             reach_.get());
        } catch (const NoCandidates&) {
            return std::nullopt;
        }
        if (ranking_ == Ranking::Shuffled) {
            auto rng = rng_for(ctx, s.numbers.key() + "|" + t.values.key());
            shuffle(candidates, rng);
            if (candidates.size() > static_cast<std::size_t>(ctx.config.width)) {
                candidates.resize(static_cast<std::size_t>(ctx.config.width));
            }
        }
        for (auto& c : candidates) {
            const std::string key = c.values.key();
            bool avoided = false;
            for (const auto& e : ctx.avoided()) avoided = avoided || e.target == key;
            if (avoided) continue;
            std::string transition = c.transition->str();
            return BackwardProposal<Target>{std::move(c), std::move(transition), ""};
        }
        return std::nullopt;
    }

    std::optional<ForwardProposal<State>> forward_step(const State& s, const Target& t, const SearchContext& ctx) {
        std::optional<ForwardMove> step;
        if (ranking_ == Ranking::Guided) {
            step = game24::forward_step(s.numbers, t.values, ctx.avoided(), reach_.get());
        } else {
            std::vector<Successor> open;
            const std::string tk = t.values.key();
            for (auto& succ : successors(s.numbers)) {
                if (!ctx.avoided().contains(AvoidEntry{succ.state.key(), tk})) open.push_back(std::move(succ));
            }
            if (!open.empty()) {
                auto rng = rng_for(ctx, s.numbers.key() + ">" + tk);
                auto& pick = open[static_cast<std::size_t>(rng() % open.size())];
                step = ForwardMove{std::move(pick.state), pick.move};
            }
        }
        if (!step) return std::nullopt;
        std::string move = step->move.str();
        return ForwardProposal<State>{State{std::move(step->next), step->move}, std::move(move), ""};
    }

    CheckVerdict state_check(const State& s, const Target& t, const SearchContext&) const {
        if (game24::state_check(s.numbers, t.values)) return {CheckStatus::Reached, ""};
        if (s.numbers.size() <= t.values.size() + 1) return {CheckStatus::DeadEnd, ""};
        return {CheckStatus::Open, ""};
    }

    VerifyVerdict verify(std::span<const Game24Frame> path, const SearchContext&) const {
        const int i = static_cast<int>(path.size()) - 1;
        const int back = i > 0 ? i - 1 : 0;
        const auto& goal = path.front().target.payload.values;
        if (goal.size() != 1) return {back, "goal is not a single number", ""};
        auto chain = path_chain(path);
        if (!chain) return {back, "state does not meet its target", ""};
        auto verdict = verify_chain(*chain, path.front().state.payload.numbers, goal[0]);
        if (verdict.valid) return {i, "", ""};
        // A bad forward move at step k means frame k-1 must try again.
        const int j = verdict.step >= 1 && verdict.step <= i ? verdict.step - 1 : back;
        return {j, verdict.detail, ""};
    }

    Answer output(std::span<const Game24Frame> path) const {
        auto chain = path_chain(path);
        if (!chain) throw AdapterError("output called on a path that does not meet its target");
        return {format_solution(*chain, path.front().state.payload.numbers), ""};
    }

private:
    std::mt19937_64 rng_for(const SearchContext& ctx, const std::string& salt) const {
        return std::mt19937_64(ctx.config.seed ^ fnv1a64(salt + "#" + std::to_string(ctx.depth)));
    }

    template <class T>
    static void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
        // Hand-rolled so the order does not depend on the standard library.
        for (std::size_t k = v.size(); k > 1; --k) {
            std::size_t r = static_cast<std::size_t>(rng() % k);
            std::swap(v[k - 1], v[r]);
        }
    }

    Ranking ranking_;
    std::shared_ptr<ReachCache> reach_;
};

inline SearchTrace solve_rff_t(OracleAdapter& adapter, const NumberSet& numbers, const EngineConfig& cfg,
                               const Rational& goal = 24) {
    return run_rff_t(adapter, Game24State{numbers, std::nullopt}, Game24Target{NumberSet(std::vector<Rational>{goal}), std::nullopt},
                     cfg);
}

}  // namespace rff::game24
