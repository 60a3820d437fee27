#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rff/baselines/baselines.hpp"
#include "rff/game24/number_set.hpp"
#include "rff/game24/solver.hpp"
#include "rff/game24/verify.hpp"

namespace rff::game24 {

/// Moves along a path of forward states.
inline std::vector<ArithMove> path_moves(std::span<const Game24State> path) {
    std::vector<ArithMove> chain;
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (path[k].move) chain.push_back(*path[k].move);
    }
    return chain;
}

/// The chain as a solution when it ends at exactly {goal} and verifies.
inline std::optional<Answer> finished_chain(std::span<const Game24State> path, const Rational& goal) {
    const auto& last = path.back().numbers;
    if (last.size() != 1 || last[0] != goal) return std::nullopt;
    auto chain = path_moves(path);
    const auto& original = path.front().numbers;
    if (!verify_chain(chain, original, goal).valid) return std::nullopt;
    return Answer{format_solution(chain, original), ""};
}

inline std::string chain_text(const std::vector<ArithMove>& chain) {
    std::string out;
    for (const auto& m : chain) out += (out.empty() ? "" : "; ") + m.str();
    return out;
}

/// Exact baselines for the Game of 24.
///
/// CoT takes, at every step, the move whose result lies closest to the goal
/// (ties by canonical move order). ForwardTree ranks children by whether the
/// goal is still reachable from them, using the brute-force solver.
class OracleBaselineAdapter {
public:
    using Problem = NumberSet;
    using State = Game24State;

    explicit OracleBaselineAdapter(Rational goal = 24) : goal_(std::move(goal)) {}

    CotAttempt cot(const NumberSet& numbers) const {
        std::vector<Game24State> path{Game24State{numbers, std::nullopt}};
        while (path.back().numbers.size() > 1) {
            std::optional<Successor> best;
            Rational best_gap;
            for (auto& s : successors(path.back().numbers)) {
                Rational gap = abs(s.move.result - goal_);
                if (!best || gap < best_gap) {
                    best_gap = gap;
                    best = std::move(s);
                }
            }
            if (!best) break;
            path.push_back(Game24State{best->state, best->move});
        }
        CotAttempt out;
        out.from = numbers.key();
        out.state = path.back().numbers.key();
        out.chain = chain_text(path_moves(path));
        if (auto answer = finished_chain(path, goal_)) {
            out.answer = answer->text;
        } else {
            out.failure = "chain does not reach " + to_string(goal_);
        }
        return out;
    }

    [[nodiscard]] std::string state_key(const State& s) const { return s.numbers.key(); }

    std::vector<ForwardProposal<State>> expand(const State& s) const {
        std::vector<ForwardProposal<State>> out;
        for (auto& succ : successors(s.numbers)) {
            std::string move = succ.move.str();
            out.push_back({State{std::move(succ.state), succ.move}, std::move(move), ""});
        }
        return out;
    }

    double value(const State& s) const { return brute_force_solvable(s.numbers, goal_).solvable ? 1.0 : 0.0; }

    std::optional<Answer> finish(std::span<const State> path) const { return finished_chain(path, goal_); }

    [[nodiscard]] const Rational& goal() const { return goal_; }

private:
    Rational goal_;
};

template <class A>
SearchTrace run_forward_tree(A& adapter, const NumberSet& numbers, const EngineConfig& cfg, int width) {
    return rff::run_forward_tree(adapter, Game24State{numbers, std::nullopt}, cfg, width);
}

}  // namespace rff::game24
