#pragma once

// RFF-G: backward decomposition paired with forward steps whose results only
// accumulate. No verifier and no backtracking: every established fact is
// useful or redundant, never harmful.

#include <string>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/core/config.hpp"
#include "rff/core/trace.hpp"
#include "rff/engines/rff_t.hpp"

namespace rff {

namespace detail {

template <DagAccumulationAdapter A>
class RffGRun {
public:
    using State = typename A::State;
    using Target = typename A::Target;

    RffGRun(A& adapter, const EngineConfig& cfg) : adapter_(adapter), cfg_(cfg) {}

    SearchTrace run(State x, Target t) {
        if (goal_reached(x, t, 0)) return finish(x, t, 0);
        return cfg_.backward_mode == BackwardMode::Pair ? run_pair(std::move(x), std::move(t))
                                                        : run_single(std::move(x), std::move(t));
    }

    SearchTrace abort(const std::string& reason) {
        trace_.set_outcome(Outcome::unsolved("AdapterFailure: " + reason));
        return std::move(trace_);
    }

private:
    SearchTrace run_pair(State state, const Target& goal) {
        Target target = goal;
        for (int i = 1; i <= cfg_.max_steps; ++i) {
            auto next = backward(state, target, i);
            if (!next) return fail("no backward step available");
            target = std::move(*next);
            if (!forward(state, target, i)) return fail("forward step made no progress");
            if (goal_reached(state, goal, i)) return finish(state, goal, i);
        }
        trace_.set_outcome(Outcome::step_limit());
        return std::move(trace_);
    }

    SearchTrace run_single(State state, const Target& goal) {
        // Derive the whole target chain against the input alone, then freeze it.
        std::vector<Target> chain{goal};
        bool grounded = false;
        for (int k = 1; k <= cfg_.max_steps && !grounded; ++k) {
            auto next = backward(state, chain.back(), k);
            if (!next) return fail("no backward step available");
            SearchContext ctx{cfg_, k, nullptr};
            if (adapter_.target_key(*next) == adapter_.target_key(chain.back()) ||
                adapter_.state_check(state, *next, ctx).status == CheckStatus::Reached) {
                grounded = true;
            }
            if (adapter_.target_key(*next) != adapter_.target_key(chain.back())) chain.push_back(std::move(*next));
        }
        if (!grounded) return fail("backward chain not grounded");

        for (int i = 1; i <= cfg_.max_steps; ++i) {
            const Target* pending = &chain.front();
            for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                SearchContext ctx{cfg_, i, nullptr};
                if (adapter_.state_check(state, *it, ctx).status != CheckStatus::Reached) {
                    pending = &*it;
                    break;
                }
            }
            if (!forward(state, *pending, i)) return fail("forward step made no progress");
            if (goal_reached(state, goal, i)) return finish(state, goal, i);
        }
        trace_.set_outcome(Outcome::step_limit());
        return std::move(trace_);
    }

    std::optional<Target> backward(const State& state, const Target& target, int depth) {
        SearchContext ctx{cfg_, depth, nullptr};
        auto proposal = adapter_.last_step(state, target, ctx);
        if (!proposal) {
            trace_.append(EventKind::BackwardStep, depth,
                          {{"from", adapter_.target_key(target)}, {"result", "no-candidates"}});
            return std::nullopt;
        }
        if (proposal->transition.empty()) {
            throw AdapterError("last_step returned a target without an explicit transition");
        }
        std::vector<Field> d{{"from", adapter_.target_key(target)},
                             {"target", adapter_.target_key(proposal->target)},
                             {"transition", proposal->transition}};
        add_raw(d, proposal->raw);
        trace_.append(EventKind::BackwardStep, depth, std::move(d));
        return std::move(proposal->target);
    }

    /// S_i <- S_{i-1} u R(S_{i-1}, T_i). Returns false when R contributes nothing.
    bool forward(State& state, const Target& target, int depth) {
        SearchContext ctx{cfg_, depth, nullptr};
        auto proposal = adapter_.forward_step(state, target, ctx);
        if (!proposal) return false;
        State merged = adapter_.merge(state, proposal->state);
        if (!adapter_.includes(merged, state)) {
            throw AdapterError("accumulated state lost facts during merge");
        }
        std::vector<Field> d{{"from", adapter_.state_key(state)},
                             {"target", adapter_.target_key(target)},
                             {"move", proposal->move},
                             {"added", adapter_.state_key(proposal->state)},
                             {"state", adapter_.state_key(merged)}};
        add_raw(d, proposal->raw);
        trace_.append(EventKind::ForwardStep, depth, std::move(d));
        state = std::move(merged);
        return true;
    }

    bool goal_reached(const State& state, const Target& goal, int depth) {
        SearchContext ctx{cfg_, depth, nullptr};
        auto verdict = adapter_.state_check(state, goal, ctx);
        std::vector<Field> d{{"state", adapter_.state_key(state)},
                             {"target", adapter_.target_key(goal)},
                             {"result", std::string(to_string(verdict.status))}};
        add_raw(d, verdict.raw);
        trace_.append(EventKind::StateCheck, depth, std::move(d));
        return verdict.status == CheckStatus::Reached;
    }

    SearchTrace finish(const State& state, const Target& goal, int depth) {
        auto answer = adapter_.output(state, goal);
        std::vector<Field> d{{"answer", answer.text}};
        add_raw(d, answer.raw);
        trace_.append(EventKind::Output, depth, std::move(d));
        trace_.set_outcome(Outcome::solved(std::move(answer.text)));
        return std::move(trace_);
    }

    SearchTrace fail(std::string reason) {
        trace_.set_outcome(Outcome::unsolved(std::move(reason)));
        return std::move(trace_);
    }

    A& adapter_;
    const EngineConfig& cfg_;
    SearchTrace trace_;
};

}  // namespace detail

/// Runs RFF-G from input `x` toward goal `t`. The termination check asks
/// whether the information the goal needs is established in the accumulated
/// state; it runs once before the first backward call and after every
/// forward step.
template <DagAccumulationAdapter A>
SearchTrace run_rff_g(A& adapter, typename A::State x, typename A::Target t, const EngineConfig& cfg) {
    validate(cfg);
    detail::RffGRun<A> run(adapter, cfg);
    try {
        return run.run(std::move(x), std::move(t));
    } catch (const AdapterError& e) {
        return run.abort(e.what());
    }
}

}  // namespace rff
