#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "rff/game24/oracle_adapter.hpp"
#include "rff/game24/puzzles.hpp"
#include "rff/game24/solver.hpp"
#include "rff/game24/verify.hpp"

using namespace rff;
using namespace rff::game24;

namespace {

ArithMove mv(int a, char op, int b, int r) { return ArithMove{a, b, *parse_op(op), r}; }

NumberSet ns(std::initializer_list<int> v) { return NumberSet(v); }

Game24Target tgt(std::initializer_list<int> v) { return Game24Target{NumberSet(v), std::nullopt}; }

}  // namespace

TEST(NumberSet, KeyIgnoresOrderAndNormalizesFractions) {
    EXPECT_EQ(ns({12, 2, 12, 1}).key(), ns({1, 2, 12, 12}).key());
    NumberSet a(std::vector<Rational>{Rational(24, 1)});
    NumberSet b(std::vector<Rational>{Rational(48, 2)});
    EXPECT_EQ(a.key(), b.key());
    EXPECT_EQ(a.key(), "24");
    EXPECT_EQ(parse_numbers("1/3 -2 8").key(), "-2 1/3 8");
}

TEST(NumberSet, CanonicalizeIsIdempotent) {
    auto s = parse_numbers("9 3/6 -1 4");
    EXPECT_EQ(canonicalize(canonicalize(s)), canonicalize(s));
}

TEST(NumberSet, DivisionRoundTripsExactly) {
    for (int a = -7; a <= 7; ++a) {
        for (int b = -7; b <= 7; ++b) {
            if (b == 0) {
                EXPECT_FALSE(apply(Op::Div, a, b));
                continue;
            }
            EXPECT_EQ(*apply(Op::Mul, *apply(Op::Div, a, b), b), Rational(a));
        }
    }
}

TEST(NumberSet, SuccessorsSkipRepeatedPairs) {
    // {5,5}: 5+5, 5-5, 5*5, 5/5 only.
    auto s = successors(ns({5, 5}));
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s[0].move.str(), "5+5=10");
    EXPECT_EQ(s[2].move.str(), "5*5=25");
}

TEST(BruteForce, KnownCases) {
    EXPECT_TRUE(brute_force_solvable(ns({4, 6, 1, 1})).solvable);
    EXPECT_TRUE(brute_force_solvable(ns({3, 8, 1, 1})).solvable);
    EXPECT_FALSE(brute_force_solvable(ns({1, 1, 1, 1})).solvable);
    EXPECT_FALSE(brute_force_solvable(ns({1, 1, 1, 1, 1})).solvable);
    // Needs fractions: 8 / (3 - 8/3).
    EXPECT_TRUE(brute_force_solvable(ns({3, 3, 8, 8})).solvable);
}

TEST(BruteForce, WitnessEvaluatesToGoal) {
    for (auto s : {ns({4, 6, 1, 1}), ns({3, 3, 8, 8}), ns({1, 2, 12, 12}), ns({1, 4, 7, 8, 8})}) {
        auto r = brute_force_solvable(s);
        ASSERT_TRUE(r.solvable) << s.key();
        EXPECT_TRUE(verify_expression(r.witness, s)) << r.witness;
    }
}

TEST(BruteForce, RejectsOutOfRangeSizes) {
    EXPECT_THROW(brute_force_solvable(NumberSet{}), std::invalid_argument);
    EXPECT_THROW(brute_force_solvable(ns({1, 1, 1, 1, 1, 1, 1})), std::invalid_argument);
}

TEST(RedundantOne, AddsOne) {
    EXPECT_EQ(add_redundant_one(ns({4, 7, 8, 8})), ns({1, 4, 7, 8, 8}));
}

TEST(BackwardCandidates, PrefersTargetsBuiltFromCurrent) {
    auto c = backward_candidates(ns({1, 2, 12, 12}), tgt({24}), 5);
    ASSERT_FALSE(c.empty());
    EXPECT_EQ(c[0].values, ns({12, 12}));
    EXPECT_EQ(c[0].transition->str(), "12+12=24");
}

TEST(BackwardCandidates, FactorPairsOfTwentyFour) {
    auto c = backward_candidates(ns({1, 1, 1, 1}), tgt({24}), 1000);
    bool has46 = false, has38 = false;
    for (const auto& t : c) {
        has46 = has46 || (t.values == ns({4, 6}) && t.transition->str() == "4*6=24");
        has38 = has38 || (t.values == ns({3, 8}) && t.transition->str() == "3*8=24");
    }
    EXPECT_TRUE(has46);
    EXPECT_TRUE(has38);
}

TEST(BackwardCandidates, ConstructibleRanksAbove) {
    auto c = backward_candidates(ns({2, 3, 4}), tgt({24}), 1000);
    std::size_t pos46 = c.size(), first_unreachable = c.size();
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k].values == ns({4, 6})) pos46 = k;
        if (first_unreachable == c.size() && !reachable(ns({2, 3, 4}), c[k].values)) first_unreachable = k;
    }
    ASSERT_LT(pos46, c.size());
    EXPECT_LT(pos46, first_unreachable);
}

TEST(BackwardCandidates, TransitionsReproduceParent) {
    for (auto cur : {ns({1, 2, 12, 12}), ns({3, 3, 8, 8}), ns({1, 5, 5, 5})}) {
        Game24Target parent{ns({4, 6}), std::nullopt};
        for (const auto& t : backward_candidates(cur, parent, 1000)) {
            ASSERT_TRUE(t.transition->holds()) << t.transition->str();
            auto back = t.values.replace(t.transition->lhs, t.transition->rhs, t.transition->result);
            ASSERT_TRUE(back);
            EXPECT_EQ(*back, parent.values);
        }
    }
}

TEST(ForwardStep, MovesTowardTarget) {
    auto r = forward_step(ns({2, 3, 4}), ns({4, 6}));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->move.str(), "2*3=6");
    EXPECT_EQ(r->next, ns({4, 6}));

    r = forward_step(ns({12, 12}), ns({24}));
    ASSERT_TRUE(r);
    EXPECT_EQ(r->move.str(), "12+12=24");
}

TEST(ForwardStep, SkipsAvoided) {
    AvoidSlice avoid{{"10", "24"}};
    auto r = forward_step(ns({5, 5}), ns({24}), avoid);
    ASSERT_TRUE(r);
    EXPECT_NE(r->next, ns({10}));
    EXPECT_EQ(r->move.str(), "5-5=0");

    AvoidSlice all{{"10", "24"}, {"0", "24"}, {"25", "24"}, {"1", "24"}};
    EXPECT_FALSE(forward_step(ns({5, 5}), ns({24}), all));
}

TEST(StateCheck, OneMoveOrEqual) {
    EXPECT_TRUE(state_check(ns({2, 3, 4}), ns({4, 6})));
    EXPECT_TRUE(state_check(ns({24}), ns({24})));
    EXPECT_FALSE(state_check(ns({1, 5, 5, 5}), ns({24})));
}

TEST(VerifyChain, Cases) {
    auto ok = verify_chain({mv(12, '+', 12, 24), mv(2, '-', 1, 1), mv(24, '*', 1, 24)}, ns({1, 2, 12, 12}));
    EXPECT_TRUE(ok.valid);

    auto unused = verify_chain({mv(4, '*', 6, 24)}, ns({4, 6, 1, 1}));
    EXPECT_FALSE(unused.valid);
    EXPECT_EQ(unused.step, 1);

    auto wrong = verify_chain({mv(3, '*', 7, 22), mv(22, '+', 2, 24)}, ns({2, 3, 7}));
    EXPECT_FALSE(wrong.valid);
    EXPECT_EQ(wrong.step, 1);

    auto missing = verify_chain({mv(4, '*', 6, 24), mv(24, '*', 9, 216)}, ns({4, 6, 1}));
    EXPECT_FALSE(missing.valid);
    EXPECT_EQ(missing.step, 2);

    EXPECT_TRUE(verify_chain({}, ns({24})).valid);
    EXPECT_EQ(verify_chain({}, ns({23})).step, 0);
}

TEST(FormatSolution, Examples) {
    std::vector<ArithMove> chain{mv(12, '+', 12, 24), mv(2, '-', 1, 1), mv(24, '*', 1, 24)};
    auto text = format_solution(chain, ns({1, 2, 12, 12}));
    EXPECT_EQ(text, "(12+12)*(2-1)");
    EXPECT_TRUE(verify_expression(text, ns({1, 2, 12, 12})));
    EXPECT_EQ(format_solution({mv(4, '*', 6, 24)}, ns({4, 6})), "4*6");
    EXPECT_EQ(format_solution({}, ns({24})), "24");
    // Right operand of - and / keeps its parentheses.
    auto frac = format_solution({ArithMove{8, 3, Op::Div, Rational(8, 3)}, ArithMove{3, Rational(8, 3), Op::Sub, Rational(1, 3)},
                                 ArithMove{8, Rational(1, 3), Op::Div, 24}},
                                ns({3, 3, 8, 8}));
    EXPECT_EQ(frac, "8/(3-8/3)");
    EXPECT_TRUE(verify_expression(frac, ns({3, 3, 8, 8})));
}

TEST(Expression, ParserAcceptsVariants) {
    EXPECT_EQ(parse_expression("4 x 6 \xC3\x97 1 / 1").value, Rational(24));
    EXPECT_EQ(parse_expression("-(2-5)*8").value, Rational(24));
    EXPECT_THROW(parse_expression("4*"), ExpressionError);
    EXPECT_THROW(parse_expression("4/(2-2)"), ExpressionError);
    EXPECT_FALSE(verify_expression("4*6", ns({4, 6, 1, 1})));
}

TEST(Puzzles, RangeSelectsLines) {
    std::istringstream in("1 1 4 6\n1 1 11 11\n\n1 1 3 8\n");
    auto all = read_puzzles(in);
    ASSERT_EQ(all.size(), 3u);
    EXPECT_EQ(all[2].index, 4);
    std::istringstream again("1 1 4 6\n1 1 11 11\n\n1 1 3 8\n");
    auto two = read_puzzles(again, parse_range("2-4"));
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0].numbers, ns({1, 1, 11, 11}));
    EXPECT_THROW(parse_range("5-2"), std::invalid_argument);
}

TEST(Puzzles, ShippedFileLine901) {
    auto p = load_puzzles(std::string(RFF_DATA_DIR) + "/24.txt", parse_range("901-1000"));
    ASSERT_EQ(p.size(), 100u);
    EXPECT_EQ(p[0].index, 901);
    EXPECT_EQ(p[0].numbers, ns({4, 5, 6, 10}));
}

TEST(OracleRffT, SolvesExamples) {
    EngineConfig cfg;
    cfg.max_steps = 20;
    cfg.width = 13;
    for (auto s : {ns({4, 6, 1, 1}), ns({1, 2, 12, 12}), ns({3, 3, 8, 8}), ns({1, 4, 7, 8, 8})}) {
        OracleAdapter a;
        auto tr = solve_rff_t(a, s, cfg);
        ASSERT_TRUE(tr.outcome().is_solved()) << s.key() << " " << tr.outcome().text;
        EXPECT_TRUE(verify_expression(tr.outcome().text, s)) << tr.outcome().text;
    }
}

TEST(OracleRffT, UnsolvableExhausts) {
    EngineConfig cfg;
    cfg.max_steps = 20;
    cfg.width = 10;
    OracleAdapter a;
    auto tr = solve_rff_t(a, ns({1, 1, 1, 1}), cfg);
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::Unsolved);
    EXPECT_EQ(tr.visited_states(), 10);
}

TEST(OracleRffT, DegenerateGoal) {
    OracleAdapter a;
    auto tr = solve_rff_t(a, ns({24}), EngineConfig{});
    ASSERT_TRUE(tr.outcome().is_solved());
    EXPECT_EQ(tr.outcome().text, "24");
    EXPECT_EQ(tr.visited_states(), 0);
}

TEST(OracleRffT, FullOracleAgreementOnFirstLines) {
    EngineConfig cfg;
    cfg.width = 13;
    auto puzzles = load_puzzles(std::string(RFF_DATA_DIR) + "/24.txt", parse_range("1-60"));
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& p : puzzles) {
        OracleAdapter a;
        auto tr = solve_rff_t(a, p.numbers, cfg);
        EXPECT_EQ(tr.outcome().is_solved(), brute_force_solvable(p.numbers).solvable) << p.numbers.key();
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "60 puzzles in " << ms << " ms\n";
}
