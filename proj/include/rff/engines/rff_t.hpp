#pragma once

// RFF-T: alternate backward target decomposition with forward steps, verify
// when a forward state meets its target, and backtrack through per-depth
// avoid sets when the path turns out wrong.

#include <algorithm>
#include <string>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/core/avoid_set.hpp"
#include "rff/core/config.hpp"
#include "rff/core/state.hpp"
#include "rff/core/trace.hpp"

namespace rff {

namespace detail {

inline std::string join_avoid(const AvoidSlice& slice) {
    std::string out;
    for (const auto& entry : slice) {
        if (!out.empty()) out += ';';
        out += entry.state;
        out += '|';
        out += entry.target;
    }
    return out;
}

inline void add_raw(std::vector<Field>& detail, const std::string& raw) {
    if (!raw.empty()) detail.push_back({"raw", raw});
}

template <TreeSearchAdapter A>
class RffTRun {
public:
    using State = typename A::State;
    using Target = typename A::Target;
    using FrameT = Frame<State, Target>;

    RffTRun(A& adapter, const EngineConfig& cfg) : adapter_(adapter), cfg_(cfg) {}

    SearchTrace run(State x, Target t) {
        frames_.push_back(FrameT{{std::move(x), 0, {}}, {std::move(t), 0, {}}});

        // Degenerate input: x may already satisfy t before any decomposition.
        switch (check(0)) {
            case CheckStatus::Reached:
                if (verify(0).revisit == 0) return finish_solved(0);
                break;
            case CheckStatus::DeadEnd:
                trace_.set_outcome(Outcome::unsolved("input cannot reach the goal"));
                return std::move(trace_);
            case CheckStatus::Open:
                break;
        }

        const long long budget = static_cast<long long>(cfg_.max_steps) * cfg_.width;
        long long iterations = 0;
        int i = 0;
        while (true) {
            if (i + 1 > cfg_.max_steps || iterations >= budget) {
                trace_.set_outcome(Outcome::step_limit());
                return std::move(trace_);
            }
            ++iterations;
            ++i;
            avoid_.clear_from(i);  // A_i <- {}
            frames_.erase(frames_.begin() + i, frames_.end());

            const FrameT& parent = frames_[static_cast<std::size_t>(i - 1)];
            const AvoidSlice& parent_avoid = avoid_.slice(i - 1);
            SearchContext ctx{cfg_, i, &parent_avoid};

            auto backward = adapter_.last_step(parent.state.payload, parent.target.payload, ctx);
            if (!backward) {
                trace_.append(EventKind::BackwardStep, i,
                              {{"from", adapter_.target_key(parent.target.payload)}, {"result", "no-candidates"}});
                if (!exhaust(i - 1, "no backward candidates")) return std::move(trace_);
                i = current_;
                continue;
            }
            if (backward->transition.empty()) {
                throw AdapterError("last_step returned a target without an explicit transition");
            }
            {
                std::vector<Field> d{{"from", adapter_.target_key(parent.target.payload)},
                                     {"target", adapter_.target_key(backward->target)},
                                     {"transition", backward->transition}};
                add_raw(d, backward->raw);
                trace_.append(EventKind::BackwardStep, i, std::move(d));
            }
            TargetState<Target> target{std::move(backward->target), i, std::move(backward->transition)};

            auto forward = adapter_.forward_step(parent.state.payload, target.payload, ctx);
            if (!forward) {
                // Every forward move toward this target is already known to fail.
                AvoidEntry failed{"", adapter_.target_key(target.payload)};
                if (!backtrack(i, i - 1, std::move(failed), "forward-exhausted")) return std::move(trace_);
                i = current_;
                continue;
            }
            {
                std::vector<Field> d{{"from", adapter_.state_key(parent.state.payload)},
                                     {"target", adapter_.target_key(target.payload)},
                                     {"move", forward->move},
                                     {"state", adapter_.state_key(forward->state)},
                                     {"avoid", join_avoid(parent_avoid)}};
                add_raw(d, forward->raw);
                trace_.append(EventKind::ForwardStep, i, std::move(d));
            }
            frames_.push_back(FrameT{{std::move(forward->state), i, std::move(forward->move)}, std::move(target)});

            auto status = check(i);
            if (status == CheckStatus::Open) continue;

            auto verdict = verify(i);
            if (status == CheckStatus::Reached && verdict.revisit == i) return finish_solved(i);

            int j = std::clamp(verdict.revisit, 0, i - 1);
            if (!backtrack(i, j, child_entry(j), status == CheckStatus::Reached ? "verify-failed" : "dead-end")) {
                return std::move(trace_);
            }
            i = current_;
        }
    }

    /// Ends the run after an adapter failure, keeping the events so far.
    SearchTrace abort(const std::string& reason) {
        trace_.set_outcome(Outcome::unsolved("AdapterFailure: " + reason));
        return std::move(trace_);
    }

private:
    CheckStatus check(int i) {
        const FrameT& f = frames_[static_cast<std::size_t>(i)];
        SearchContext ctx{cfg_, i, nullptr};
        auto verdict = adapter_.state_check(f.state.payload, f.target.payload, ctx);
        std::vector<Field> d{{"state", adapter_.state_key(f.state.payload)},
                             {"target", adapter_.target_key(f.target.payload)},
                             {"result", std::string(to_string(verdict.status))}};
        add_raw(d, verdict.raw);
        trace_.append(EventKind::StateCheck, i, std::move(d));
        return verdict.status;
    }

    VerifyVerdict verify(int i) {
        SearchContext ctx{cfg_, i, nullptr};
        std::span<const FrameT> path(frames_.data(), static_cast<std::size_t>(i) + 1);
        auto verdict = adapter_.verify(path, ctx);
        std::vector<Field> d{{"revisit", std::to_string(verdict.revisit)},
                             {"result", verdict.revisit == i ? "valid" : "invalid"}};
        if (!verdict.detail.empty()) d.push_back({"detail", verdict.detail});
        add_raw(d, verdict.raw);
        trace_.append(EventKind::Verify, i, std::move(d));
        return verdict;
    }

    SearchTrace finish_solved(int i) {
        std::span<const FrameT> path(frames_.data(), static_cast<std::size_t>(i) + 1);
        auto answer = adapter_.output(path);
        std::vector<Field> d{{"answer", answer.text}};
        add_raw(d, answer.raw);
        trace_.append(EventKind::Output, i, std::move(d));
        trace_.set_outcome(Outcome::solved(std::move(answer.text)));
        return std::move(trace_);
    }

    /// The attempt made from frame j along the current path: (S_{j+1}, T_{j+1}).
    AvoidEntry child_entry(int j) const {
        const FrameT& child = frames_[static_cast<std::size_t>(j + 1)];
        return {adapter_.state_key(child.state.payload), adapter_.target_key(child.target.payload)};
    }

    /// Records `failed` into A_j, clears deeper slices and moves to depth j.
    /// Returns false once the search has run out of alternatives.
    bool backtrack(int from, int j, AvoidEntry failed, const char* reason) {
        trace_.append(EventKind::Backtrack, from,
                      {{"to", std::to_string(j)},
                       {"state", failed.state},
                       {"target", failed.target},
                       {"reason", reason}});
        avoid_.record(j, std::move(failed));
        avoid_.clear_deeper(j);
        current_ = j;
        if (avoid_.size(j) >= static_cast<std::size_t>(cfg_.width)) {
            return exhaust(j, "width exhausted");
        }
        return true;
    }

    /// Frame j has no alternatives left: give up on it one level up.
    bool exhaust(int j, const char* reason) {
        if (j == 0) {
            trace_.set_outcome(Outcome::unsolved(std::string("search exhausted: ") + reason));
            return false;
        }
        return backtrack(j, j - 1, child_entry(j - 1), reason);
    }

    A& adapter_;
    const EngineConfig& cfg_;
    SearchTrace trace_;
    AvoidSet avoid_;
    std::vector<FrameT> frames_;
    int current_ = 0;
};

}  // namespace detail

/// Runs RFF-T from input `x` toward goal `t`.
///
/// Visited states are counted once per forward-step call that returns a
/// state. The run ends Solved (verified path), Unsolved (alternatives
/// exhausted at depth 0, or an adapter failure) or StepLimit (depth would
/// exceed L, or L*n iterations spent).
template <TreeSearchAdapter A>
SearchTrace run_rff_t(A& adapter, typename A::State x, typename A::Target t, const EngineConfig& cfg) {
    validate(cfg);
    detail::RffTRun<A> run(adapter, cfg);
    try {
        return run.run(std::move(x), std::move(t));
    } catch (const AdapterError& e) {
        return run.abort(e.what());
    }
}

}  // namespace rff
