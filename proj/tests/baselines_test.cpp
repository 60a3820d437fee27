#include <gtest/gtest.h>

#include <set>

#include "rff/baselines/game24.hpp"
#include "rff/baselines/mathdag.hpp"
#include "rff/game24/oracle_adapter.hpp"
#include "rff/llm/baselines.hpp"
#include "rff/mathdag/generator.hpp"
#include "support/fake_model.hpp"

using namespace rff;
using namespace rff::game24;

namespace {

EngineConfig engine(int L, int n) {
    EngineConfig cfg;
    cfg.max_steps = L;
    cfg.width = n;
    return cfg;
}

}  // namespace

TEST(Cot, OneForwardStepPerPuzzle) {
    OracleBaselineAdapter a;
    for (auto numbers : {NumberSet({12, 12, 2, 1}), NumberSet({1, 1, 1, 1}), NumberSet({4, 9, 10, 13})}) {
        auto tr = run_cot(a, numbers);
        EXPECT_EQ(tr.visited_states(), 1u);
        EXPECT_EQ(tr.count(EventKind::ForwardStep), 1u);
        if (tr.outcome().is_solved()) {
            EXPECT_TRUE(verify_expression(tr.outcome().text, numbers));
        }
    }
    auto tr = run_cot(a, NumberSet({1, 1, 1, 1}));
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::Unsolved);
}

TEST(Cot, GreedyChainTakesClosestResult) {
    OracleBaselineAdapter a;
    auto attempt = a.cot(NumberSet({12, 12, 2, 1}));
    // 2*12 and 12+12 both hit 24 at once; canonical order takes the former.
    EXPECT_EQ(attempt.chain.substr(0, 7), "2*12=24");
    EXPECT_EQ(serialize(run_cot(a, NumberSet({12, 12, 2, 1}))), serialize(run_cot(a, NumberSet({12, 12, 2, 1}))));
}

TEST(Cot, MathOracleGivesGroundTruth) {
    mathdag::OracleCotAdapter a;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto p = mathdag::generate_problem(seed, 5, 2);
        auto tr = run_cot(a, p);
        ASSERT_TRUE(tr.outcome().is_solved());
        EXPECT_EQ(tr.outcome().text, to_string(*p.answer));
        EXPECT_EQ(tr.visited_states(), 1u);
    }
}

TEST(ForwardTree, SolvesAndCostsMoreThanRffT) {
    OracleBaselineAdapter tree;
    std::uint64_t tree_visits = 0, rff_visits = 0;
    for (auto numbers : {NumberSet({1, 2, 12, 12}), NumberSet({4, 9, 10, 13}), NumberSet({3, 3, 8, 8})}) {
        auto tr = run_forward_tree(tree, numbers, engine(20, 5), 5);
        ASSERT_TRUE(tr.outcome().is_solved()) << numbers.key();
        EXPECT_TRUE(verify_expression(tr.outcome().text, numbers));
        tree_visits += tr.visited_states();
        OracleAdapter rff;
        auto rt = solve_rff_t(rff, numbers, engine(20, 13));
        ASSERT_TRUE(rt.outcome().is_solved());
        rff_visits += rt.visited_states();
    }
    EXPECT_GT(tree_visits, rff_visits);
}

TEST(ForwardTree, WidthOneIsASingleChain) {
    OracleBaselineAdapter tree;
    auto tr = run_forward_tree(tree, NumberSet({4, 9, 10, 13}), engine(20, 5), 1);
    ASSERT_TRUE(tr.outcome().is_solved());
    std::map<int, std::set<std::string>> parents;
    for (const auto& e : tr.events()) {
        if (e.kind == EventKind::ForwardStep) parents[e.depth].insert(e.field_or("from"));
    }
    for (const auto& [depth, from] : parents) EXPECT_EQ(from.size(), 1u) << depth;
}

TEST(ForwardTree, UnsolvableExhaustsLayers) {
    OracleBaselineAdapter tree;
    auto tr = run_forward_tree(tree, NumberSet({1, 1, 1, 1}), engine(20, 5), 5);
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::Unsolved);
    EXPECT_EQ(tr.outcome().text, "search exhausted");
    int deepest = 0;
    for (const auto& e : tr.events()) deepest = std::max(deepest, e.depth);
    EXPECT_EQ(deepest, 3);
    EXPECT_THROW(run_forward_tree(tree, NumberSet({1, 1, 1, 1}), engine(20, 5), 0), ConfigError);
}

TEST(ForwardTree, LayerLimit) {
    OracleBaselineAdapter tree;
    auto tr = run_forward_tree(tree, NumberSet({1, 1, 1, 1}), engine(2, 5), 5);
    EXPECT_EQ(tr.outcome().text, "layer limit reached");
}

TEST(LlmBaselines, AgainstStubEndpoint) {
    rff::testing::FakeGame24Model model;
    rff::testing::StubServer server([&](const std::vector<llm::Message>& m) { return model(m); });
    llm::LlmConfig cfg;
    cfg.base_url = server.base_url();
    cfg.backoff = std::chrono::milliseconds(1);
    auto client = llm::ChatClient::connect(cfg);
    llm::LlmGame24Baseline b(client);

    auto cot = run_cot(b, NumberSet({4, 9, 10, 13}));
    ASSERT_TRUE(cot.outcome().is_solved()) << serialize(cot);
    EXPECT_TRUE(verify_expression(cot.outcome().text, NumberSet({4, 9, 10, 13})));
    EXPECT_EQ(cot.visited_states(), 1u);
    EXPECT_EQ(run_cot(b, NumberSet({1, 1, 1, 1})).outcome().kind, Outcome::Kind::Unsolved);

    auto tree = run_forward_tree(b, NumberSet({4, 9, 10, 13}), engine(20, 5), 2);
    ASSERT_TRUE(tree.outcome().is_solved()) << serialize(tree);
    EXPECT_TRUE(verify_expression(tree.outcome().text, NumberSet({4, 9, 10, 13})));

    auto problem = mathdag::generate_problem(4, 4, 2);
    rff::testing::FakeMathModel math{&problem};
    rff::testing::StubServer math_server([&](const std::vector<llm::Message>& m) { return math(m); });
    cfg.base_url = math_server.base_url();
    llm::LlmMathCot mc(llm::ChatClient::connect(cfg));
    auto mt = run_cot(mc, problem);
    ASSERT_TRUE(mt.outcome().is_solved());
    EXPECT_EQ(mt.outcome().text, to_string(*problem.answer));
}
