#pragma once

#include <string>

#include "rff/baselines/baselines.hpp"
#include "rff/mathdag/problem.hpp"

namespace rff::mathdag {

/// Chain of thought over a structured problem: evaluate every definition in
/// order, as one forward chain.
class OracleCotAdapter {
public:
    using Problem = DagProblem;

    CotAttempt cot(const DagProblem& p) const {
        CotAttempt out;
        out.from = p.id;
        if (p.text_only()) {
            out.failure = "text-only problem has no structure to evaluate";
            return out;
        }
        auto values = evaluate_all(p);
        for (const auto& d : p.variables) {
            if (!out.chain.empty()) out.chain += "; ";
            out.chain += d.name + "=" + to_string(values.at(d.name));
        }
        out.state = p.goal + "=" + to_string(values.at(p.goal));
        out.answer = to_string(values.at(p.goal));
        return out;
    }
};

}  // namespace rff::mathdag
