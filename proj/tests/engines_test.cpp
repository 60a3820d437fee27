#include <gtest/gtest.h>

#include <functional>

#include "rff/core/avoid_set.hpp"
#include "rff/core/trace.hpp"
#include "rff/engines/rff_g.hpp"
#include "rff/engines/rff_t.hpp"

using namespace rff;

namespace {

// Integer toy domain with every operation scriptable.
struct ToyAdapter {
    using State = int;
    using Target = int;
    using FrameT = Frame<int, int>;
    static constexpr Capability capability = Capability::TreeSearch;

    std::function<std::optional<int>(int, int, const SearchContext&)> g = [](int, int t, const SearchContext&) {
        return std::optional<int>(t - 1);
    };
    std::function<std::optional<int>(int, int, const SearchContext&)> r = [](int s, int, const SearchContext&) {
        return std::optional<int>(s + 1);
    };
    std::function<CheckStatus(int, int, int)> c = [](int s, int t, int) {
        return s == t ? CheckStatus::Reached : CheckStatus::Open;
    };
    std::function<int(std::span<const FrameT>)> v = [](std::span<const FrameT> p) {
        return static_cast<int>(p.size()) - 1;
    };
    std::vector<AvoidSlice> seen_avoid;

    std::string state_key(int s) const { return std::to_string(s); }
    std::string target_key(int t) const { return std::to_string(t); }

    std::optional<BackwardProposal<int>> last_step(int s, int t, const SearchContext& ctx) {
        auto next = g(s, t, ctx);
        if (!next) return std::nullopt;
        return BackwardProposal<int>{*next, std::to_string(*next) + "+1=" + std::to_string(t), ""};
    }
    std::optional<ForwardProposal<int>> forward_step(int s, int t, const SearchContext& ctx) {
        seen_avoid.push_back(ctx.avoided());
        auto next = r(s, t, ctx);
        if (!next) return std::nullopt;
        return ForwardProposal<int>{*next, "step", ""};
    }
    CheckVerdict state_check(int s, int t, const SearchContext& ctx) { return {c(s, t, ctx.depth), ""}; }
    VerifyVerdict verify(std::span<const FrameT> path, const SearchContext&) { return {v(path), "", ""}; }
    Answer output(std::span<const FrameT> path) { return {std::to_string(path.back().state.payload), ""}; }
};

static_assert(TreeSearchAdapter<ToyAdapter>);

EngineConfig config(int L, int n) {
    EngineConfig cfg;
    cfg.max_steps = L;
    cfg.width = n;
    return cfg;
}

// Accumulating toy: the state is a count, each forward step adds one.
struct CounterAdapter {
    using State = std::vector<int>;
    using Target = int;
    static constexpr Capability capability = Capability::DagAccumulation;
    bool shrink = false;

    std::string state_key(const State& s) const { return std::to_string(s.size()); }
    std::string target_key(int t) const { return std::to_string(t); }
    std::optional<BackwardProposal<int>> last_step(const State& s, int t, const SearchContext&) const {
        int next = std::min(t, static_cast<int>(s.size()) + 1);
        return BackwardProposal<int>{next, "need " + std::to_string(next), ""};
    }
    std::optional<ForwardProposal<State>> forward_step(const State& s, int, const SearchContext&) const {
        return ForwardProposal<State>{State{static_cast<int>(s.size())}, "add", ""};
    }
    State merge(const State& a, const State& b) const {
        State out = a;
        if (shrink) out.clear();
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }
    bool includes(const State& big, const State& small) const { return big.size() >= small.size(); }
    CheckVerdict state_check(const State& s, int t, const SearchContext&) const {
        return {static_cast<int>(s.size()) >= t ? CheckStatus::Reached : CheckStatus::Open, ""};
    }
    Answer output(const State& s, int) const { return {std::to_string(s.size()), ""}; }
};

static_assert(DagAccumulationAdapter<CounterAdapter>);

}  // namespace

TEST(AvoidSet, RecordAndQuery) {
    AvoidSet a;
    EXPECT_FALSE(a.contains(0, "1 2", "24"));
    a.record(2, {"S", "T"});
    EXPECT_TRUE(a.contains(2, "S", "T"));
    EXPECT_FALSE(a.contains(1, "S", "T"));
    EXPECT_TRUE(avoid_contains(a, 2, "S", "T"));
}

TEST(AvoidSet, ClearedOnReentry) {
    // Record at depth 2, backtrack to 1, re-enter depth 2: A_2 <- {}.
    AvoidSet a;
    a.record(2, {"S", "T"});
    a.record(1, {"S1", "T1"});
    a.clear_deeper(1);
    a.clear_from(2);
    EXPECT_FALSE(a.contains(2, "S", "T"));
    EXPECT_TRUE(a.contains(1, "S1", "T1"));
    a.clear_from(0);
    EXPECT_TRUE(a.empty());
}

TEST(Trace, SerializeRoundTrip) {
    SearchTrace t;
    t.append(EventKind::BackwardStep, 1, {{"from", "24"}, {"transition", "12+12=24"}});
    t.append(EventKind::ForwardStep, 1, {{"raw", "line1\nline2\twith tab \\ slash"}});
    t.append(EventKind::Backtrack, 1, {{"to", "0"}});
    t.set_outcome(Outcome::solved("(12+12)*(2-1)"));
    auto text = serialize(t);
    EXPECT_EQ(text.substr(0, kTraceHeader.size()), kTraceHeader);
    auto back = parse_trace(text);
    EXPECT_EQ(back, t);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(back.visited_states(), 1u);
}

TEST(Trace, ParserRejectsTampering) {
    SearchTrace t;
    t.append(EventKind::ForwardStep, 1);
    t.set_outcome(Outcome::unsolved("x"));
    auto text = serialize(t);
    auto bad = text;
    bad.replace(bad.find("visited=1"), 9, "visited=2");
    EXPECT_THROW(parse_trace(bad), TraceFormatError);
    EXPECT_THROW(parse_trace("not a trace"), TraceFormatError);
}

TEST(RffT, RejectsBadConfig) {
    ToyAdapter a;
    EXPECT_THROW(run_rff_t(a, 0, 3, config(0, 5)), ConfigError);
    EXPECT_THROW(run_rff_t(a, 0, 3, config(5, 0)), ConfigError);
}

TEST(RffT, DegenerateInputNeedsNoForwardStep) {
    ToyAdapter a;
    auto tr = run_rff_t(a, 7, 7, config(5, 5));
    ASSERT_TRUE(tr.outcome().is_solved());
    EXPECT_EQ(tr.visited_states(), 0u);
    EXPECT_EQ(tr.count(EventKind::BackwardStep), 0u);
}

TEST(RffT, SolvesWhenForwardMeetsBackward) {
    // S climbs 0,1,2..., T descends 6,5,4...: they meet at depth 3.
    ToyAdapter a;
    auto tr = run_rff_t(a, 0, 6, config(10, 5));
    ASSERT_TRUE(tr.outcome().is_solved());
    EXPECT_EQ(tr.outcome().text, "3");
    EXPECT_EQ(tr.visited_states(), 3u);
}

TEST(RffT, StepLimitWhenNeverMeeting) {
    ToyAdapter a;
    a.g = [](int, int t, const SearchContext&) { return std::optional<int>(t + 1); };
    auto tr = run_rff_t(a, 0, 100, config(4, 5));
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::StepLimit);
    EXPECT_EQ(tr.visited_states(), 4u);
}

TEST(RffT, WidthBoundsAttemptsPerDepth) {
    // Every depth-1 attempt is a dead end, so depth 0 runs out after n tries.
    ToyAdapter a;
    int counter = 0;
    a.r = [&](int, int, const SearchContext&) { return std::optional<int>(100 + counter++); };
    a.c = [](int, int, int depth) { return depth == 0 ? CheckStatus::Open : CheckStatus::DeadEnd; };
    a.v = [](std::span<const ToyAdapter::FrameT> p) { return static_cast<int>(p.size()) - 2; };
    auto tr = run_rff_t(a, 0, 1, config(10, 4));
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::Unsolved);
    EXPECT_EQ(tr.outcome().text, "search exhausted: width exhausted");
    EXPECT_EQ(tr.visited_states(), 4u);
    // The k-th forward call sees the k-1 earlier failures.
    ASSERT_EQ(a.seen_avoid.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(a.seen_avoid[k].size(), k);
    EXPECT_TRUE(a.seen_avoid[3].contains(AvoidEntry{"100", "0"}));
}

TEST(RffT, VerifyFailureBacktracksToRequestedDepth) {
    // Meets at depth 2, verifier rejects twice asking for depth 1, then accepts.
    ToyAdapter a;
    int rejections = 0;
    a.v = [&](std::span<const ToyAdapter::FrameT> p) {
        const int i = static_cast<int>(p.size()) - 1;
        return rejections++ < 2 ? 1 : i;
    };
    auto tr = run_rff_t(a, 0, 4, config(10, 5));
    ASSERT_TRUE(tr.outcome().is_solved());
    int backtracks = 0;
    for (const auto& e : tr.events()) {
        if (e.kind != EventKind::Backtrack) continue;
        ++backtracks;
        EXPECT_LT(std::stoi(e.field_or("to")), e.depth);
        EXPECT_EQ(e.field_or("to"), "1");
        EXPECT_EQ(e.field_or("reason"), "verify-failed");
    }
    EXPECT_EQ(backtracks, 2);
}

TEST(RffT, ForwardExhaustionRecordsTarget) {
    ToyAdapter a;
    a.r = [](int, int, const SearchContext& ctx) {
        return ctx.avoided().empty() ? std::nullopt : std::optional<int>(1);
    };
    auto tr = run_rff_t(a, 0, 2, config(10, 5));
    ASSERT_TRUE(tr.outcome().is_solved());
    bool saw = false;
    for (const auto& e : tr.events()) {
        if (e.kind == EventKind::Backtrack) {
            EXPECT_EQ(e.field_or("reason"), "forward-exhausted");
            EXPECT_EQ(e.field_or("target"), "1");
            saw = true;
        }
    }
    EXPECT_TRUE(saw);
}

TEST(RffT, AdapterFailureBecomesUnsolved) {
    ToyAdapter a;
    a.r = [](int, int, const SearchContext&) -> std::optional<int> { throw AdapterError("boom"); };
    auto tr = run_rff_t(a, 0, 6, config(10, 5));
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::Unsolved);
    EXPECT_EQ(tr.outcome().text, "AdapterFailure: boom");
    EXPECT_EQ(tr.count(EventKind::BackwardStep), 1u);
}

TEST(RffT, DeterministicTraces) {
    ToyAdapter a, b;
    EXPECT_EQ(serialize(run_rff_t(a, 0, 9, config(10, 5))), serialize(run_rff_t(b, 0, 9, config(10, 5))));
}

TEST(RffG, AccumulatesUntilGoal) {
    CounterAdapter a;
    auto tr = run_rff_g(a, {}, 3, config(10, 1));
    ASSERT_TRUE(tr.outcome().is_solved());
    EXPECT_EQ(tr.outcome().text, "3");
    EXPECT_EQ(tr.visited_states(), 3u);
}

TEST(RffG, StepLimit) {
    CounterAdapter a;
    auto tr = run_rff_g(a, {}, 30, config(5, 1));
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::StepLimit);
    EXPECT_EQ(tr.visited_states(), 5u);
}

TEST(RffG, MergeMustNotLoseFacts) {
    CounterAdapter a;
    a.shrink = true;
    auto tr = run_rff_g(a, {1, 2}, 5, config(5, 1));
    EXPECT_EQ(tr.outcome().kind, Outcome::Kind::Unsolved);
    EXPECT_EQ(tr.outcome().text.rfind("AdapterFailure:", 0), 0u);
}
