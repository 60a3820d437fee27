#pragma once

// Baselines under the same accounting as the engines: every state a method
// produces is one ForwardStep event, and nothing else counts.
//
//   run_cot           one forward chain, no target, no backtracking. The whole
//                     chain is a single ForwardStep.
//   run_forward_tree  layered forward search keeping the best `width` states
//                     of each layer by the adapter's value estimate. Every
//                     generated child is a ForwardStep.

#include <algorithm>
#include <concepts>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rff/core/adapter.hpp"
#include "rff/core/config.hpp"
#include "rff/core/trace.hpp"

namespace rff {

struct BaselineKind {
    enum class Kind { CoT, ForwardTree };
    Kind kind = Kind::CoT;
    int width = 1;  ///< b, for ForwardTree.

    static BaselineKind cot() { return {Kind::CoT, 1}; }
    static BaselineKind forward_tree(int b) {
        if (b < 1) throw ConfigError("forward tree width must be >= 1, got " + std::to_string(b));
        return {Kind::ForwardTree, b};
    }
};

/// Result of one complete chain-of-thought attempt.
struct CotAttempt {
    std::string from;    ///< Start state key.
    std::string state;   ///< Final state key.
    std::string chain;   ///< The steps, as text.
    std::optional<std::string> answer;  ///< Set only when the chain checks out.
    std::string failure;                ///< Why not, otherwise.
    std::string raw;
};

template <class A>
concept CotAdapter = requires(A& a, const typename A::Problem& x) {
    { a.cot(x) } -> std::same_as<CotAttempt>;
};

template <CotAdapter A>
SearchTrace run_cot(A& adapter, const typename A::Problem& x) {
    SearchTrace trace;
    CotAttempt attempt;
    try {
        attempt = adapter.cot(x);
    } catch (const AdapterError& e) {
        attempt.failure = std::string("AdapterFailure: ") + e.what();
    }
    std::vector<Field> d{{"from", attempt.from}, {"state", attempt.state}, {"move", attempt.chain}};
    if (!attempt.raw.empty()) d.push_back({"raw", attempt.raw});
    trace.append(EventKind::ForwardStep, 1, std::move(d));
    if (attempt.answer) {
        trace.append(EventKind::Output, 1, {{"answer", *attempt.answer}});
        trace.set_outcome(Outcome::solved(*attempt.answer));
    } else {
        trace.set_outcome(Outcome::unsolved(attempt.failure.empty() ? "chain does not verify" : attempt.failure));
    }
    return trace;
}

/// Forward search interface: children of a state, a value estimate for
/// ranking, and a final check on a root-to-leaf path.
template <class A>
concept ForwardTreeAdapter = requires(A& a, const typename A::State& s, std::span<const typename A::State> path) {
    { a.state_key(s) } -> std::convertible_to<std::string>;
    { a.expand(s) } -> std::same_as<std::vector<ForwardProposal<typename A::State>>>;
    { a.value(s) } -> std::same_as<double>;
    { a.finish(path) } -> std::same_as<std::optional<Answer>>;
};

template <ForwardTreeAdapter A>
SearchTrace run_forward_tree(A& adapter, typename A::State x, const EngineConfig& cfg, int width) {
    using State = typename A::State;
    validate(cfg);
    BaselineKind::forward_tree(width);

    SearchTrace trace;
    std::vector<std::vector<State>> layer{{std::move(x)}};
    try {
        for (int depth = 1; depth <= cfg.max_steps; ++depth) {
            struct Child {
                std::vector<State> path;
                double value = 0;
            };
            std::vector<Child> children;
            std::vector<std::string> seen;
            for (const auto& path : layer) {
                for (auto& p : adapter.expand(path.back())) {
                    const std::string key = adapter.state_key(p.state);
                    std::vector<Field> d{{"from", adapter.state_key(path.back())}, {"state", key}, {"move", p.move}};
                    if (!p.raw.empty()) d.push_back({"raw", p.raw});
                    trace.append(EventKind::ForwardStep, depth, std::move(d));

                    std::vector<State> next = path;
                    next.push_back(std::move(p.state));
                    if (auto answer = adapter.finish(std::span<const State>(next))) {
                        trace.append(EventKind::Output, depth, {{"answer", answer->text}});
                        trace.set_outcome(Outcome::solved(answer->text));
                        return trace;
                    }
                    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
                    seen.push_back(key);
                    children.push_back({std::move(next), 0});
                }
            }
            if (children.empty()) {
                trace.set_outcome(Outcome::unsolved("search exhausted"));
                return trace;
            }
            for (auto& c : children) {
                c.value = adapter.value(c.path.back());
                trace.append(EventKind::StateCheck, depth,
                             {{"state", adapter.state_key(c.path.back())}, {"value", std::to_string(c.value)}});
            }
            std::stable_sort(children.begin(), children.end(),
                             [](const Child& a, const Child& b) { return a.value > b.value; });
            if (children.size() > static_cast<std::size_t>(width)) children.resize(static_cast<std::size_t>(width));
            layer.clear();
            for (auto& c : children) layer.push_back(std::move(c.path));
        }
    } catch (const AdapterError& e) {
        trace.set_outcome(Outcome::unsolved(std::string("AdapterFailure: ") + e.what()));
        return trace;
    }
    trace.set_outcome(Outcome::unsolved("layer limit reached"));
    return trace;
}

}  // namespace rff
