#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "llmchess/chat/live.hpp"
#include "llmchess/chat/scripted.hpp"
#include "llmchess/chat/session.hpp"
#include "test_support.hpp"

using namespace llmchess::chat;

namespace {

std::unique_ptr<ChatAdapter> scripted(std::string_view jsonl) {
    return std::make_unique<ScriptedAdapter>(std::make_shared<Script>(Script::parse(jsonl)));
}

RetryPolicy no_sleep(std::vector<std::chrono::milliseconds>* slept = nullptr) {
    RetryPolicy r;
    r.max_retries = 3;
    r.initial_backoff = std::chrono::milliseconds(100);
    r.sleep = [slept](std::chrono::milliseconds d) {
        if (slept) slept->push_back(d);
    };
    return r;
}

}  // namespace

TEST_CASE("create_session defaults") {
    SamplingParams params;
    CHECK(params.temperature == 1.0);
    CHECK(params.top_p == 0.9);
    auto session = create_session(params, scripted(R"(["e5"])"));
    CHECK(session.transcript().empty());
    CHECK(session.adapter().name() == "mock-scripted");

    SamplingParams bad;
    bad.top_p = 0;
    CHECK_THROWS_AS(create_session(bad, scripted(R"(["e5"])")), AdapterConfigError);
    CHECK_THROWS_AS(create_session(params, nullptr), AdapterConfigError);
    CHECK_THROWS_AS(ScriptedAdapter(std::make_shared<Script>()), AdapterConfigError);
}

TEST_CASE("script parsing") {
    const auto s = Script::parse("[\"e5\", \"Nf6\"]\n\n\"d5\"\n[{\"error\":\"transport\"}, {\"error\":\"refusal\"}]\n");
    REQUIRE(s.slots.size() == 3);
    CHECK(s.slots[0].size() == 2);
    CHECK(s.slots[1][0].text == "d5");
    CHECK(s.slots[2][0].kind == ScriptItem::Kind::TransportFault);
    CHECK(s.slots[2][1].kind == ScriptItem::Kind::Refusal);
    CHECK_THROWS_AS(Script::parse("[1]"), ScriptError);
    CHECK_THROWS_AS(Script::parse("[{\"error\":\"boom\"}]"), ScriptError);
    CHECK_THROWS_AS(Script::parse("not json"), ScriptError);
    CHECK_THROWS_AS(Script::parse("[]"), ScriptError);
}

TEST_CASE("complete replays slots in order") {
    auto session = create_session({}, scripted("[\"e5\"]\n[\"Nf6\"]\n"));
    CHECK(session.complete({ChatMessage::user("start e4")}) == "e5");
    CHECK(session.complete({ChatMessage::user("Move: Nf3")}) == "Nf6");
    REQUIRE(session.transcript().size() == 4);
    CHECK(session.transcript()[1].role == Role::Assistant);
    CHECK(session.transcript()[3].content == "Nf6");
    // Past the end of the script the final reply repeats.
    CHECK(session.complete({ChatMessage::user("Move: d4")}) == "Nf6");
}

TEST_CASE("complete enforces role alternation") {
    auto session = create_session({}, scripted("[\"e5\"]"));
    CHECK_THROWS_AS(session.complete({ChatMessage::assistant("hi")}), SessionError);
    CHECK_THROWS_AS(session.complete({ChatMessage::user("a"), ChatMessage::user("b")}), SessionError);
    CHECK_THROWS_AS(session.complete({ChatMessage::user("")}), SessionError);
    CHECK_NOTHROW(session.complete({ChatMessage::system("rules"), ChatMessage::user("go")}));
    CHECK_THROWS_AS(session.complete({ChatMessage::system("late")}), SessionError);
    CHECK_NOTHROW(session.complete({ChatMessage::user("again")}));

    auto shots = create_session({}, scripted("[\"e5\"]"));
    CHECK_NOTHROW(shots.complete({ChatMessage::system("extract"), ChatMessage::user("x"), ChatMessage::assistant("Nf3"),
                                  ChatMessage::user("y")}));
}

TEST_CASE("assistant prefix") {
    auto log = std::make_shared<RawLog>();
    auto session = create_session({}, scripted("[\"The knight is loose, so Nf6\"]"), {}, log);
    const auto text = session.complete({ChatMessage::user("Move: e4")}, {"Let's think step by step.", Annotation::Reasoning});
    CHECK(text.rfind("Let's think step by step.", 0) == 0);
    CHECK(text == "Let's think step by step. The knight is loose, so Nf6");
    CHECK(session.transcript().back().content == text);
    CHECK(session.transcript().back().annotation == Annotation::Reasoning);
    CHECK_FALSE(session.last_used_prefix_fallback());
}

namespace {

/// Records what it was sent and cannot continue from a prefix.
class EchoAdapter final : public ChatAdapter {
public:
    std::vector<AdapterRequest>* seen;
    explicit EchoAdapter(std::vector<AdapterRequest>* s) : seen(s) {}
    std::string generate(const AdapterRequest& r) override {
        seen->push_back(r);
        return "reply" + std::to_string(seen->size());
    }
    std::string name() const override { return "echo"; }
};

}  // namespace

TEST_CASE("prefix fallback folds the prefix into the last user message and logs it") {
    std::vector<AdapterRequest> seen;
    auto log = std::make_shared<RawLog>();
    auto session = create_session({}, std::make_unique<EchoAdapter>(&seen), {}, log);
    const auto text = session.complete({ChatMessage::user("Move: e4")}, {"Let's think step by step.", std::nullopt});
    CHECK(text == "Let's think step by step. reply1");
    REQUIRE(seen.size() == 1);
    CHECK(seen[0].messages.back().content == "Move: e4\n\nLet's think step by step.");
    CHECK_FALSE(seen[0].assistant_prefix);
    CHECK(session.transcript()[0].content == "Move: e4");
    CHECK(session.last_used_prefix_fallback());
    bool logged = false;
    for (const auto& e : log->entries()) logged |= e["event"] == "prefix-fallback";
    CHECK(logged);
}

TEST_CASE("transport faults are retried with backoff") {
    std::vector<std::chrono::milliseconds> slept;
    auto session = create_session(
        {}, scripted(R"([{"error":"transport"}, {"error":"transport"}, "e5"])"), no_sleep(&slept));
    CHECK(session.complete({ChatMessage::user("e4")}) == "e5");
    CHECK(session.last_retry_count() == 2);
    CHECK(session.total_retries() == 2);
    CHECK(slept == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(100), std::chrono::milliseconds(200)});

    auto doomed = create_session({}, scripted(R"([{"error":"transport"}])"), no_sleep());
    CHECK_THROWS_AS(doomed.complete({ChatMessage::user("e4")}), TransportError);
    CHECK(doomed.last_retry_count() == 3);

    auto refused = create_session({}, scripted(R"([{"error":"refusal"}, "e5"])"), no_sleep());
    CHECK_THROWS_AS(refused.complete({ChatMessage::user("e4")}), RefusalError);
    CHECK(refused.last_retry_count() == 0);

    RetryPolicy capped;
    capped.initial_backoff = std::chrono::milliseconds(1000);
    capped.max_backoff = std::chrono::milliseconds(5000);
    CHECK(capped.backoff(1).count() == 1000);
    CHECK(capped.backoff(3).count() == 4000);
    CHECK(capped.backoff(4).count() == 5000);
}

TEST_CASE("regenerate walks a slot's alternatives and keeps the transcript length") {
    auto session = create_session({}, scripted("[\"x1\", \"x2\", \"x3\"]\n[\"y\"]"));
    CHECK(session.complete({ChatMessage::user("e4")}) == "x1");
    const auto len = session.transcript().size();
    CHECK(session.regenerate() == "x2");
    CHECK(session.regenerate() == "x3");
    CHECK(session.regenerate() == "x3");
    CHECK(session.transcript().size() == len);
    CHECK(session.transcript().back().content == "x3");
    REQUIRE(session.rejected().size() == 3);
    CHECK(session.rejected()[0].content == "x1");
    CHECK(session.rejected()[1].content == "x2");
    CHECK(session.rejected()[2].content == "x3");
    CHECK(session.complete({ChatMessage::user("d4")}) == "y");

    auto fresh = create_session({}, scripted("[\"a\"]"));
    CHECK_THROWS_AS(fresh.regenerate(), SessionError);
}

TEST_CASE("regenerate keeps the prefix") {
    auto session = create_session({}, scripted("[\"a\", \"b\"]"));
    session.complete({ChatMessage::user("go")}, {"Let's think step by step.", Annotation::Reasoning});
    CHECK(session.regenerate() == "Let's think step by step. b");
    CHECK(session.transcript().back().annotation == Annotation::Reasoning);
}

TEST_CASE("prune keep-reasoning(8) condenses the oldest two of ten") {
    std::string script;
    for (int i = 0; i < 10; ++i) script += "[\"analysis " + std::to_string(i) + " so I play a6\"]\n";
    auto session = create_session({}, scripted(script));
    for (int i = 0; i < 10; ++i) {
        session.complete({ChatMessage::user("Move: " + std::to_string(i))}, {std::nullopt, Annotation::Reasoning});
        session.set_last_summary("a6");
    }
    const auto before = session.transcript();
    session.prune(HistoryPolicy::keep_reasoning(8));
    const auto& t = session.transcript();
    REQUIRE(t.size() == before.size());
    int condensed = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].condensed) {
            ++condensed;
            CHECK(t[i].visible() == "a6");
            CHECK(i <= 3);
        }
        CHECK(t[i].content == before[i].content);
    }
    CHECK(condensed == 2);
    CHECK_NOTHROW(check_transcript(t));
}

TEST_CASE("prune keep-description(1) leaves only the newest description") {
    auto session = create_session({}, scripted("[\"e5\"]"));
    for (int i = 0; i < 5; ++i) {
        ChatMessage m = ChatMessage::user("Move: x\n\nboard " + std::to_string(i), Annotation::Description);
        m.summary = "Move: x";
        session.complete({m});
    }
    session.prune(HistoryPolicy::keep_description(1));
    int full = 0;
    for (const auto& m : session.transcript())
        if (m.annotation == Annotation::Description && !m.condensed) ++full;
    CHECK(full == 1);
    CHECK_FALSE(session.transcript()[8].condensed);
    CHECK(session.transcript()[8].visible().find("board 4") != std::string::npos);

    // The next request only sees the condensed text.
    std::vector<AdapterRequest> seen;
    auto echo = create_session({}, std::make_unique<EchoAdapter>(&seen));
    ChatMessage d1 = ChatMessage::user("full one", Annotation::Description);
    d1.summary = "short one";
    echo.complete({d1});
    ChatMessage d2 = ChatMessage::user("full two", Annotation::Description);
    d2.summary = "short two";
    echo.prune(HistoryPolicy::keep_description(1));
    echo.complete({d2});
    echo.prune(HistoryPolicy::keep_description(1));
    echo.complete({ChatMessage::user("next")});
    CHECK(seen.back().messages[0].content == "short one");
    CHECK(seen.back().messages[2].content == "full two");
}

TEST_CASE("prune_before condenses ahead of the sample") {
    std::vector<AdapterRequest> seen;
    auto echo = create_session({}, std::make_unique<EchoAdapter>(&seen));
    CompleteOptions opts;
    opts.prune_before = HistoryPolicy::keep_description(1);
    ChatMessage d1 = ChatMessage::user("full one", Annotation::Description);
    d1.summary = "short one";
    echo.complete({d1}, opts);
    CHECK(seen.back().messages[0].content == "full one");
    ChatMessage d2 = ChatMessage::user("full two", Annotation::Description);
    d2.summary = "short two";
    echo.complete({d2}, opts);
    CHECK(seen.back().messages[0].content == "short one");
    CHECK(seen.back().messages[2].content == "full two");
}

TEST_CASE("prune keep-all is a no-op") {
    auto session = create_session({}, scripted("[\"e5\"]"));
    session.complete({ChatMessage::user("a", Annotation::Description)});
    session.set_last_summary("e5");
    const auto before = session.transcript();
    session.prune(HistoryPolicy::keep_all());
    CHECK(session.transcript() == before);
}

TEST_CASE("history policy text form") {
    CHECK(HistoryPolicy::parse("keep-reasoning(8)") == HistoryPolicy::keep_reasoning(8));
    CHECK(HistoryPolicy::parse("keep-description(1)").to_string() == "keep-description(1)");
    CHECK(HistoryPolicy::parse("keep-all") == HistoryPolicy::keep_all());
    CHECK_THROWS_AS(HistoryPolicy::parse("keep-reasoning(0)"), std::invalid_argument);
    CHECK_THROWS_AS(HistoryPolicy::parse("keep-some"), std::invalid_argument);
}

TEST_CASE("mock sessions are deterministic") {
    auto run = [] {
        auto log = std::make_shared<RawLog>();
        auto session = create_session({}, scripted("[\"a\", \"b\"]\n[{\"error\":\"transport\"}, \"c\"]"), no_sleep(), log);
        session.complete({ChatMessage::user("1")});
        session.regenerate();
        session.complete({ChatMessage::user("2")});
        nlohmann::json out = session.transcript();
        return out.dump() + nlohmann::json(log->entries()).dump();
    };
    CHECK(run() == run());
}

TEST_CASE("message JSON round trip") {
    ChatMessage m = ChatMessage::assistant("long analysis Nf6", Annotation::Reasoning);
    m.summary = "Nf6";
    m.condensed = true;
    CHECK(nlohmann::json(m).get<ChatMessage>() == m);
    CHECK(nlohmann::json(ChatMessage::user("x")).dump() == R"({"content":"x","role":"user"})");
}

TEST_CASE("chat-completions body helpers") {
    AdapterRequest r;
    r.messages = {ChatMessage::user("e4")};
    r.assistant_prefix = "Let's think step by step.";
    const auto body = build_request_body(r, true);
    CHECK(body["temperature"] == 1.0);
    CHECK(body["top_p"] == 0.9);
    CHECK(body["messages"].size() == 2);
    CHECK(build_request_body(r, false)["messages"].size() == 1);

    CHECK(parse_response_body(nlohmann::json::parse(R"({"choices":[{"message":{"role":"assistant","content":"e5"}}]})")) == "e5");
    CHECK_THROWS_AS(parse_response_body(nlohmann::json::parse(R"({"choices":[{"finish_reason":"content_filter","message":{"content":null}}]})")),
                    RefusalError);
    CHECK_THROWS_AS(parse_response_body(nlohmann::json::parse(R"({"choices":[]})")), TransportError);
}

TEST_CASE("live adapter against a local HTTP server") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        const int n = ++calls;
        CHECK(req.get_header_value("Authorization") == "Bearer test-key");
        const auto body = nlohmann::json::parse(req.body);
        const std::string last = body["messages"].back()["content"];
        if (last == "flaky" && n == 1) {
            res.status = 503;
            res.set_content("overloaded", "text/plain");
            return;
        }
        if (last == "forbidden") {
            res.set_content(R"({"choices":[{"finish_reason":"content_filter","message":{"content":null}}]})", "application/json");
            return;
        }
        res.set_content(nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "e5"}}}}}}}.dump(),
                        "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("LLMCHESS_TEST_KEY", "test-key", 1);
    LiveConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
    cfg.api_key_env = "LLMCHESS_TEST_KEY";
    cfg.requests_per_minute = 60000;
    auto limiter = std::make_shared<RateLimiter>(cfg.requests_per_minute);

    {
        auto log = std::make_shared<RawLog>();
        auto session = create_session({}, std::make_unique<LiveAdapter>(cfg, limiter), no_sleep(), log);
        CHECK(session.complete({ChatMessage::user("flaky")}) == "e5");
        CHECK(session.last_retry_count() == 1);
        CHECK_THROWS_AS(session.complete({ChatMessage::user("forbidden")}), RefusalError);
        int http = 0;
        for (const auto& e : log->entries())
            if (e["event"] == "http") {
                ++http;
                CHECK(e.contains("request"));
                CHECK(e.contains("response"));
            }
        CHECK(http == 3);
    }

    LiveConfig missing = cfg;
    missing.api_key_env = "LLMCHESS_TEST_KEY_UNSET";
    CHECK_THROWS_AS(LiveAdapter(missing, limiter), AdapterConfigError);

    server.stop();
    th.join();
}

TEST_CASE("rate limiter spaces requests") {
    RateLimiter limiter(60000);  // 1 ms apart
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 20; ++i) limiter.acquire();
    CHECK(std::chrono::steady_clock::now() - t0 >= std::chrono::milliseconds(19));
}
