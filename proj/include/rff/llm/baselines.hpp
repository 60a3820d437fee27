#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rff/baselines/baselines.hpp"
#include "rff/baselines/game24.hpp"
#include "rff/game24/verify.hpp"
#include "rff/llm/math_adapter.hpp"
#include "rff/llm/session.hpp"

namespace rff::llm {

/// Model-backed CoT and ForwardTree for the Game of 24. Proposed moves are
/// rechecked locally and invalid ones dropped; answers must verify.
class LlmGame24Baseline {
public:
    using Problem = game24::NumberSet;
    using State = game24::Game24State;

    explicit LlmGame24Baseline(std::shared_ptr<ChatClient> client, std::shared_ptr<const TemplateSet> templates = nullptr,
                               Rational goal = 24)
        : session_(std::move(client), std::move(templates), Domain::Game24), goal_(std::move(goal)) {}

    CotAttempt cot(const game24::NumberSet& numbers) {
        auto ex = session_.ask(Role::CotSolve, {{"current", numbers.key()}});
        CotAttempt out;
        out.from = numbers.key();
        out.raw = ex.log;
        try {
            out.chain = parse_answer_text(ex.reply);
        } catch (const ParseError& e) {
            out.failure = e.what();
            return out;
        }
        try {
            if (game24::verify_expression(out.chain, numbers, goal_)) {
                out.state = to_string(goal_);
                out.answer = out.chain;
            } else {
                out.failure = "expression does not verify";
            }
        } catch (const game24::ExpressionError& e) {
            out.failure = std::string("unreadable expression: ") + e.what();
        }
        return out;
    }

    [[nodiscard]] std::string state_key(const State& s) const { return s.numbers.key(); }

    std::vector<ForwardProposal<State>> expand(const State& s) {
        if (s.numbers.size() < 2) return {};
        auto ex = session_.ask(Role::Propose, {{"current", s.numbers.key()}});
        std::vector<ForwardProposal<State>> out;
        std::vector<std::string> seen;
        std::size_t pos = 0;
        const std::string& text = ex.reply;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
            pos = end == std::string::npos ? text.size() + 1 : end + 1;
            std::optional<MoveReply> reply;
            try {
                reply = parse_move_reply(line);
            } catch (const ParseError&) {
                continue;
            }
            if (!reply->move.holds()) continue;
            auto after = s.numbers.replace(reply->move.lhs, reply->move.rhs, reply->move.result);
            if (!after || (reply->leaving && *reply->leaving != *after)) continue;
            if (std::find(seen.begin(), seen.end(), after->key()) != seen.end()) continue;
            seen.push_back(after->key());
            out.push_back({State{*after, reply->move}, reply->move.str(), out.empty() ? ex.log : ""});
        }
        return out;
    }

    double value(const State& s) {
        if (s.numbers.size() == 1) return s.numbers[0] == goal_ ? 1.0 : 0.0;
        return parse_evaluation(session_.ask(Role::Evaluate, {{"current", s.numbers.key()}}).reply);
    }

    std::optional<Answer> finish(std::span<const State> path) const { return game24::finished_chain(path, goal_); }

private:
    Session session_;
    Rational goal_;
};

/// Model-backed CoT for word problems. The answer is whatever number the
/// model gives; correctness is judged against ground truth by the caller.
class LlmMathCot {
public:
    using Problem = mathdag::DagProblem;

    explicit LlmMathCot(std::shared_ptr<ChatClient> client, std::shared_ptr<const TemplateSet> templates = nullptr)
        : session_(std::move(client), std::move(templates), Domain::Math) {}

    CotAttempt cot(const mathdag::DagProblem& p) {
        auto ex = session_.ask(Role::CotSolve, {{"background", problem_text(p)}, {"current", "(none)"}});
        CotAttempt out;
        out.from = p.id;
        out.raw = ex.log;
        out.chain = ex.reply;
        try {
            out.answer = to_string(parse_answer_number(ex.reply));
            out.state = *out.answer;
        } catch (const ParseError& e) {
            out.failure = e.what();
        }
        return out;
    }

private:
    Session session_;
};

}  // namespace rff::llm
