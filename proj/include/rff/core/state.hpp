#pragma once

#include <string>

namespace rff {

/// What has been established after `depth` forward steps (S_i).
template <class Payload>
struct ProblemState {
    Payload payload;
    int depth = 0;
    std::string provenance;  ///< The forward transition that produced this state; empty for S_0.
};

/// What must be reached at step `depth` (T_i).
template <class Payload>
struct TargetState {
    Payload payload;
    int depth = 0;
    std::string transition_note;  ///< Backward step linking this target to its parent. Non-empty for depth >= 1.
};

/// One level of the RFF-T stack: the pair (S_i, T_i).
template <class State, class Target>
struct Frame {
    ProblemState<State> state;
    TargetState<Target> target;
};

}  // namespace rff
