#pragma once

// Domain adapter contract shared by the engines and baselines.
//
// An adapter supplies the five reasoning operations for one problem family:
//   last_step     G(S, T)    backward: propose the pre-target one step before T
//   forward_step  R(S, T, A) forward: advance S one step toward T, avoiding A
//   state_check   C(S, T)    has S met T (or is it one operation away)?
//   verify        V(path)    RFF-T only: is the full path correct, else which depth to revisit
//   output        O(x, t|S)  render the final answer
// plus canonical keys for states and targets.

#include <concepts>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "rff/core/avoid_set.hpp"
#include "rff/core/config.hpp"
#include "rff/core/state.hpp"

namespace rff {

enum class Capability { TreeSearch, DagAccumulation };

/// Raised by adapters when a call fails or returns content that cannot be used.
/// Engines turn it into an Unsolved outcome rather than propagating.
class AdapterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Call-site information handed to adapter operations.
struct SearchContext {
    const EngineConfig& config;
    int depth = 0;                      ///< Step index i being produced (or checked).
    const AvoidSlice* avoid = nullptr;  ///< A_{i-1}: failed children of the frame being expanded.

    [[nodiscard]] const AvoidSlice& avoided() const {
        static const AvoidSlice empty;
        return avoid ? *avoid : empty;
    }
};

template <class Target>
struct BackwardProposal {
    Target target;
    std::string transition;  ///< Explicit backward step, e.g. "12+12=24". Must be non-empty.
    std::string raw;         ///< Model text when LLM-backed.
};

template <class State>
struct ForwardProposal {
    State state;
    std::string move;
    std::string raw;
};

enum class CheckStatus {
    Reached,  ///< S meets T: hand the path to the verifier.
    Open,     ///< Keep reasoning.
    DeadEnd,  ///< S can no longer meet T on this path.
};

constexpr std::string_view to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::Reached: return "reached";
        case CheckStatus::Open: return "open";
        case CheckStatus::DeadEnd: return "dead-end";
    }
    return "?";
}

struct CheckVerdict {
    CheckStatus status = CheckStatus::Open;
    std::string raw;
};

struct VerifyVerdict {
    int revisit = 0;  ///< Equal to the current depth when the path is correct.
    std::string detail;
    std::string raw;
};

struct Answer {
    std::string text;
    std::string raw;
};

/// Adapter usable by RFF-T. Verify is mandatory here.
template <class A>
concept TreeSearchAdapter =
    requires(A& a, const typename A::State& s, const typename A::Target& t, const SearchContext& ctx,
             std::span<const Frame<typename A::State, typename A::Target>> path) {
        requires A::capability == Capability::TreeSearch;
        { a.state_key(s) } -> std::convertible_to<std::string>;
        { a.target_key(t) } -> std::convertible_to<std::string>;
        { a.last_step(s, t, ctx) } -> std::same_as<std::optional<BackwardProposal<typename A::Target>>>;
        { a.forward_step(s, t, ctx) } -> std::same_as<std::optional<ForwardProposal<typename A::State>>>;
        { a.state_check(s, t, ctx) } -> std::same_as<CheckVerdict>;
        { a.verify(path, ctx) } -> std::same_as<VerifyVerdict>;
        { a.output(path) } -> std::same_as<Answer>;
    };

/// Adapter usable by RFF-G. States only grow: `merge` folds the forward
/// delta into the accumulated state and `includes` tests the chain property.
/// `state_check` answers whether what the target needs is already established.
template <class A>
concept DagAccumulationAdapter =
    requires(A& a, const typename A::State& s, const typename A::Target& t, const SearchContext& ctx) {
        requires A::capability == Capability::DagAccumulation;
        { a.state_key(s) } -> std::convertible_to<std::string>;
        { a.target_key(t) } -> std::convertible_to<std::string>;
        { a.last_step(s, t, ctx) } -> std::same_as<std::optional<BackwardProposal<typename A::Target>>>;
        { a.forward_step(s, t, ctx) } -> std::same_as<std::optional<ForwardProposal<typename A::State>>>;
        { a.merge(s, s) } -> std::same_as<typename A::State>;
        { a.includes(s, s) } -> std::same_as<bool>;
        { a.state_check(s, t, ctx) } -> std::same_as<CheckVerdict>;
        { a.output(s, t) } -> std::same_as<Answer>;
    };

}  // namespace rff
