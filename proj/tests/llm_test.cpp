#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rff/game24/verify.hpp"
#include "rff/llm/game24_adapter.hpp"
#include "rff/llm/math_adapter.hpp"
#include "support/fake_model.hpp"
#include "support/stub_server.hpp"

using namespace rff;
using namespace rff::llm;
using rff::testing::FakeGame24Model;
using rff::testing::FakeMathModel;
using rff::testing::StubServer;

namespace {

LlmConfig stub_config(const StubServer& server, int retries = 3) {
    LlmConfig cfg = LlmConfig::for_domain(Domain::Game24);
    cfg.base_url = server.base_url();
    cfg.api_key = "test-key";
    cfg.max_retries = retries;
    cfg.timeout = std::chrono::milliseconds(5000);
    cfg.backoff = std::chrono::milliseconds(1);
    return cfg;
}

std::shared_ptr<ChatClient> client_for(const StubServer& server, int retries = 3) {
    return ChatClient::connect(stub_config(server, retries));
}

const std::vector<Message> kHello{{"user", "hello"}};

EngineConfig engine(int L, int n) {
    EngineConfig cfg;
    cfg.max_steps = L;
    cfg.width = n;
    return cfg;
}

}  // namespace

TEST(Chat, ReturnsReplyVerbatim) {
    StubServer server([](const auto&) { return rff::testing::ok("  twenty-four \n"); });
    auto result = client_for(server)->chat(kHello);
    EXPECT_EQ(result.text, "  twenty-four \n");
    EXPECT_EQ(result.retries, 0);
}

TEST(Chat, RetriesRateLimitThenSucceeds) {
    int served = 0;
    StubServer server([&](const auto&) -> HttpReply {
        if (served++ < 2) return {429, R"({"error":"rate limited"})"};
        return rff::testing::ok("fine");
    });
    auto client = client_for(server);
    std::vector<std::chrono::milliseconds> waits;
    client->set_sleeper([&](std::chrono::milliseconds d) { waits.push_back(d); });
    auto result = client->chat(kHello);
    EXPECT_EQ(result.text, "fine");
    EXPECT_EQ(result.retries, 2);
    EXPECT_EQ(client->total_retries(), 2);
    EXPECT_EQ(server.requests(), 3);
    ASSERT_EQ(waits.size(), 2u);
    EXPECT_EQ(waits[1], 2 * waits[0]);
}

TEST(Chat, GivesUpAfterMaxRetries) {
    StubServer server([](const auto&) { return HttpReply{503, "down"}; });
    auto client = client_for(server, 2);
    EXPECT_THROW(client->chat(kHello), TransportError);
    EXPECT_EQ(server.requests(), 3);
}

TEST(Chat, AuthErrorIsNotRetried) {
    StubServer server([](const auto&) { return HttpReply{401, "no"}; });
    auto client = client_for(server);
    EXPECT_THROW(client->chat(kHello), AuthError);
    EXPECT_EQ(server.requests(), 1);
}

TEST(Chat, MalformedBodyShowsExcerpt) {
    StubServer server([](const auto&) { return HttpReply{200, "<html>gateway exploded</html>"}; });
    try {
        client_for(server)->chat(kHello);
        FAIL() << "expected TransportError";
    } catch (const TransportError& e) {
        EXPECT_NE(std::string(e.what()).find("gateway exploded"), std::string::npos);
    }
}

TEST(Chat, UnreachableEndpoint) {
    LlmConfig cfg;
    cfg.base_url = "http://127.0.0.1:1/v1";
    cfg.max_retries = 1;
    cfg.backoff = std::chrono::milliseconds(1);
    auto client = ChatClient::connect(cfg);
    EXPECT_THROW(client->chat(kHello), TransportError);
    EXPECT_EQ(client->total_retries(), 1);
}

TEST(Chat, RequestCarriesModelAndTemperature) {
    LlmConfig cfg;
    cfg.model = "m";
    cfg.temperature = 0.7;
    auto body = nlohmann::json::parse(chat_request_body(cfg, kHello));
    EXPECT_EQ(body["model"], "m");
    EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.7);
    EXPECT_EQ(body["messages"][0]["content"], "hello");
    EXPECT_DOUBLE_EQ(LlmConfig::for_domain(Domain::Math).temperature, 0.0);
}

TEST(Parse, TargetReply) {
    auto r = parse_target_reply("Target: 12 12, because 12+12=24");
    EXPECT_EQ(r.values, game24::NumberSet({12, 12}));
    EXPECT_EQ(r.transition.str(), "12+12=24");
    EXPECT_THROW(parse_target_reply("Target: 12 12"), ParseError);
    EXPECT_THROW(parse_target_reply("I think 12 and 12."), ParseError);
    auto u = parse_target_reply("**Target:** 4, 6 because 4 \xC3\x97 6 = 24");
    EXPECT_EQ(u.values, game24::NumberSet({4, 6}));
    EXPECT_EQ(u.transition.op, Op::Mul);
}

TEST(Parse, MoveReply) {
    auto r = parse_move_reply("2 * 3 = 6, leaving 4 6.");
    EXPECT_EQ(r.move.str(), "2*3=6");
    ASSERT_TRUE(r.leaving);
    EXPECT_EQ(*r.leaving, game24::NumberSet({4, 6}));
    auto f = parse_move_reply("Move: 8 / 3 = 8/3, leaving 3 8/3");
    EXPECT_EQ(f.move.result, Rational(8, 3));
    EXPECT_FALSE(parse_move_reply("Let me think.\n13 - 9 = 4 (left: 4 4 10)").leaving->empty());
    EXPECT_THROW(parse_move_reply("no idea"), ParseError);
}

TEST(Parse, Verdicts) {
    EXPECT_TRUE(parse_verdict("Yes, 4 and 6 can reach 24 in one step"));
    EXPECT_FALSE(parse_verdict("Verdict: no"));
    EXPECT_TRUE(parse_verdict("Reasoning...\nVerdict: **yes**"));
    EXPECT_THROW(parse_verdict("perhaps"), ParseError);
    EXPECT_DOUBLE_EQ(parse_evaluation("Verdict: likely"), 0.5);
}

TEST(Parse, VerifyClamp) {
    EXPECT_EQ(clamp_backtrack(parse_verify_reply("step 2 is wrong").step, 5), 2);
    EXPECT_EQ(clamp_backtrack(parse_verify_reply("blah blah").step, 5), 4);
    EXPECT_EQ(clamp_backtrack(parse_verify_reply("Backtrack: 9").step, 5), 4);
    EXPECT_EQ(clamp_backtrack(parse_verify_reply("Backtrack: 0").step, 5), 1);
    EXPECT_EQ(clamp_backtrack(std::nullopt, 1), 0);
    EXPECT_TRUE(parse_verify_reply("Valid").valid);
}

TEST(Parse, MathReplies) {
    auto need = parse_need_reply("Need: total_cost, since answer = total_cost - discount");
    EXPECT_EQ(need.name, "total_cost");
    EXPECT_EQ(need.rationale, "answer = total_cost - discount");
    EXPECT_THROW(parse_need_reply("Need: total_cost"), ParseError);
    auto fact = parse_fact_reply("Fact: price = $1,250.50");
    EXPECT_EQ(fact.name, "price");
    EXPECT_EQ(fact.value, Rational(2501, 2));
    EXPECT_EQ(parse_answer_number("So the total is 72.\nAnswer: 72 apples"), Rational(72));
    EXPECT_THROW(parse_answer_number("72"), ParseError);
}

TEST(Templates, RoundTripOwnExample) {
    TemplateSet set;
    for (auto d : {Domain::Game24, Domain::Math}) {
        for (auto r : kRoles) {
            const auto& t = set.get(d, r);
            auto back = t.extract(t.render(t.example));
            ASSERT_TRUE(back) << to_string(d) << "." << to_string(r);
            EXPECT_EQ(*back, t.example) << to_string(d) << "." << to_string(r);
            for (const auto& need : required_slots(d, r)) EXPECT_TRUE(t.example.count(need)) << need;
        }
    }
}

TEST(Templates, ShippedFilesMatchBuiltins) {
    TemplateSet builtin;
    auto loaded = TemplateSet::load(std::filesystem::path(RFF_SOURCE_DIR) / "templates");
    for (auto d : {Domain::Game24, Domain::Math}) {
        for (auto r : kRoles) {
            EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(RFF_SOURCE_DIR) / "templates" /
                                                template_file_name(d, r)));
            EXPECT_EQ(loaded.get(d, r).text, builtin.get(d, r).text) << template_file_name(d, r);
        }
    }
}

TEST(Templates, LoadedTemplateMustKeepSlots) {
    auto dir = std::filesystem::temp_directory_path() / "rff_tpl_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "game24.forward.txt") << "Numbers {current}, aim {target}. Move: ?\n";
    }
    EXPECT_THROW(TemplateSet::load(dir), TemplateError);
    {
        std::ofstream(dir / "game24.forward.txt") << "Numbers {current}, aim {target}, not {avoid}. Move: ?\n";
    }
    auto set = TemplateSet::load(dir);
    EXPECT_EQ(set.get(Domain::Game24, Role::Forward).render({{"current", "1"}, {"target", "2"}, {"avoid", "-"}}),
              "Numbers 1, aim 2, not -. Move: ?");
    std::filesystem::remove_all(dir);
}

TEST(LlmGame24, ForwardStepParsesAndValidates) {
    std::vector<std::string> replies{"2 * 3 = 6, leaving 4 6"};
    StubServer server([&](const auto&) { return rff::testing::ok(replies.front()); });
    LlmGame24Adapter adapter(client_for(server));
    EngineConfig cfg;
    SearchContext ctx{cfg, 1, nullptr};
    auto step = adapter.forward_step(Game24State{{2, 3, 4}, std::nullopt},
                                     Game24Target{NumberSet({4, 6}), std::nullopt}, ctx);
    ASSERT_TRUE(step);
    EXPECT_EQ(step->state.numbers, NumberSet({4, 6}));
    EXPECT_EQ(step->move, "2*3=6");
    EXPECT_NE(step->raw.find("<<< 2 * 3 = 6"), std::string::npos);
}

TEST(LlmGame24, WrongArithmeticIsRetriedOnceThenFails) {
    StubServer server([](const auto&) { return rff::testing::ok("Move: 3 * 7 = 22, leaving 2 22"); });
    LlmGame24Adapter adapter(client_for(server));
    EngineConfig cfg;
    SearchContext ctx{cfg, 1, nullptr};
    try {
        adapter.forward_step(Game24State{{2, 3, 7}, std::nullopt}, Game24Target{NumberSet({24}), std::nullopt}, ctx);
        FAIL() << "expected AdapterError";
    } catch (const AdapterError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("LocalValidationError:", 0), 0u) << e.what();
    }
    EXPECT_EQ(server.requests(), 2);
}

TEST(LlmGame24, AvoidedMoveIsRejectedWithReason) {
    std::vector<std::vector<Message>> seen;
    StubServer server([&](const std::vector<Message>& m) {
        seen.push_back(m);
        return rff::testing::ok(seen.size() == 1 ? "Move: 2 * 3 = 6, leaving 4 6" : "Move: 2 + 4 = 6, leaving 3 6");
    });
    LlmGame24Adapter adapter(client_for(server));
    EngineConfig cfg;
    AvoidSlice avoid{AvoidEntry{"4 6", "24"}};
    SearchContext ctx{cfg, 1, &avoid};
    auto step =
        adapter.forward_step(Game24State{{2, 3, 4}, std::nullopt}, Game24Target{NumberSet({24}), std::nullopt}, ctx);
    ASSERT_TRUE(step);
    EXPECT_EQ(step->state.numbers, NumberSet({3, 6}));
    ASSERT_EQ(seen.size(), 2u);
    EXPECT_NE(seen[0].back().content.find("- 4 6"), std::string::npos);
    EXPECT_NE(seen[1].back().content.find("already failed"), std::string::npos);
}

TEST(LlmGame24, LastStepRequiresConsistentTransition) {
    StubServer server([](const auto&) { return rff::testing::ok("Target: 12 12, because 12+12=24"); });
    LlmGame24Adapter adapter(client_for(server));
    EngineConfig cfg;
    SearchContext ctx{cfg, 1, nullptr};
    auto t = adapter.last_step(Game24State{{1, 2, 12, 12}, std::nullopt}, Game24Target{NumberSet({24}), std::nullopt},
                               ctx);
    ASSERT_TRUE(t);
    EXPECT_EQ(t->target.values, NumberSet({12, 12}));
    EXPECT_EQ(t->transition, "12+12=24");
    // The same reply cannot decompose a different target.
    EXPECT_THROW(adapter.last_step(Game24State{{1, 2, 12, 12}, std::nullopt},
                                   Game24Target{NumberSet({25}), std::nullopt}, ctx),
                 AdapterError);
}

TEST(LlmGame24, FullLoopAgainstStubEndpoint) {
    FakeGame24Model model;
    model.leading_statuses = {429};
    model.wrong_arithmetic_first = true;
    model.dead_move_then_lie = true;
    StubServer server([&](const std::vector<Message>& m) { return model(m); });
    auto client = client_for(server);
    LlmGame24Adapter adapter(client);
    auto trace = solve_rff_t(adapter, NumberSet({1, 2, 12, 12}), engine(20, 5));
    ASSERT_TRUE(trace.outcome().is_solved()) << serialize(trace);
    EXPECT_TRUE(game24::verify_expression(trace.outcome().text, NumberSet({1, 2, 12, 12})));
    EXPECT_EQ(client->total_retries(), 1);
    EXPECT_TRUE(model.lied);
    EXPECT_EQ(model.verify_calls, 1);
    // The model's false "yes" is caught locally and its unparseable verify
    // reply falls back to i-1.
    bool saw_backtrack = false;
    for (const auto& e : trace.events()) {
        if (e.kind == EventKind::Backtrack && e.field_or("reason") == "verify-failed") {
            EXPECT_EQ(e.field_or("to"), std::to_string(e.depth - 1));
            saw_backtrack = true;
        }
    }
    EXPECT_TRUE(saw_backtrack);
    EXPECT_EQ(trace.visited_states(), trace.count(EventKind::ForwardStep));
}

TEST(LlmGame24, RecordedSessionReplaysByteIdentical) {
    auto cassette = std::make_shared<Cassette>();
    std::string recorded;
    {
        FakeGame24Model model;
        model.leading_statuses = {429};
        model.dead_move_then_lie = true;
        StubServer server([&](const std::vector<Message>& m) { return model(m); });
        auto cfg = stub_config(server);
        auto live = std::make_shared<HttpTransport>(cfg.base_url, cfg.api_key, cfg.timeout);
        auto client = std::make_shared<ChatClient>(cfg, std::make_shared<RecordingTransport>(live, cassette));
        LlmGame24Adapter adapter(client);
        recorded = serialize(solve_rff_t(adapter, NumberSet({4, 9, 10, 13}), engine(20, 5)));
    }
    auto path = std::filesystem::temp_directory_path() / "rff_cassette_test.json";
    cassette->save(path.string());
    auto loaded = std::make_shared<Cassette>(Cassette::load(path.string()));
    std::filesystem::remove(path);

    LlmConfig cfg;
    cfg.backoff = std::chrono::milliseconds(1);
    cfg.api_key = "unused";
    auto client = std::make_shared<ChatClient>(cfg, std::make_shared<ReplayTransport>(loaded));
    LlmGame24Adapter adapter(client);
    EXPECT_EQ(serialize(solve_rff_t(adapter, NumberSet({4, 9, 10, 13}), engine(20, 5))), recorded);
}

TEST(LlmMath, RffGAgainstStubEndpoint) {
    auto problem = mathdag::generate_problem(11, 5, 2);
    FakeMathModel model{&problem};
    StubServer server([&](const std::vector<Message>& m) { return model(m); });
    auto cfg = stub_config(server);
    cfg.temperature = 0;
    auto client = ChatClient::connect(cfg);
    LlmMathAdapter adapter(client, problem_text(problem));
    auto trace = solve_rff_g(adapter, engine(20, 1));
    ASSERT_TRUE(trace.outcome().is_solved()) << serialize(trace);
    EXPECT_EQ(trace.outcome().text, to_string(*problem.answer));
}

TEST(LlmMath, UnparseableNeedIsAdapterFailure) {
    StubServer server([](const auto&) { return rff::testing::ok("Verdict: no\nI need more time."); });
    LlmMathAdapter adapter(client_for(server), "What is 2 plus 3?");
    auto trace = solve_rff_g(adapter, engine(5, 1));
    EXPECT_EQ(trace.outcome().kind, Outcome::Kind::Unsolved);
    EXPECT_EQ(trace.outcome().text.rfind("AdapterFailure:", 0), 0u);
}
