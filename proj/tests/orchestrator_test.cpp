#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "llmchess/chat/scripted.hpp"
#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"
#include "llmchess/engine/material.hpp"
#include "llmchess/orchestrator/audit.hpp"
#include "llmchess/orchestrator/experiment.hpp"
#include "llmchess/orchestrator/game.hpp"
#include "llmchess/orchestrator/probe.hpp"
#include "llmchess/prompt/templates.hpp"
#include "test_support.hpp"

using namespace llmchess;
using namespace llmchess::orchestrator;

namespace {

chess::Board board_after(const std::vector<std::string>& sans) {
    chess::Board b = chess::Board::initial();
    for (const auto& s : sans) b = chess::apply_move(b, chess::parse_san(b, s));
    return b;
}

// Plays a fixed reply in listed positions, MaterialEngine elsewhere.
class ForcedEngine final : public engine::Engine {
public:
    void force(const std::vector<std::string>& before, const std::string& san) { forced_[board_after(before).fen()] = san; }

    std::vector<engine::RankedMove> top_moves(const chess::Board& b, int k) override {
        if (auto it = forced_.find(b.fen()); it != forced_.end())
            return {{chess::parse_san(b, it->second), 1, engine::EvalScore::cp(0)}};
        return fallback_.top_moves(b, k);
    }

private:
    std::map<std::string, std::string> forced_;
    engine::MaterialEngine fallback_;
};

std::uint64_t seed_for_opening(std::string_view opening) {
    for (std::uint64_t s = 1;; ++s) {
        Rng rng(s);
        if (engine::sample_opening(rng) == opening) return s;
    }
}

chat::RetryPolicy no_sleep() {
    chat::RetryPolicy r;
    r.max_retries = 1;
    r.sleep = [](std::chrono::milliseconds) {};
    return r;
}

struct Scripted {
    GameOutput out;
    std::shared_ptr<chat::RawLog> log;
};

Scripted run_scripted(const std::string& variation, std::string_view script, engine::Engine& engine,
                      std::uint64_t seed, int move_cap = kDefaultMoveCap) {
    GameSettings settings;
    settings.variation = prompt::builtin_variation(variation);
    settings.retry = no_sleep();
    settings.move_cap = move_cap;
    GameResources res;
    res.engine = &engine;
    res.engine_name = "forced";
    res.player = std::make_unique<chat::ScriptedAdapter>(std::make_shared<chat::Script>(chat::Script::parse(script)));
    res.extractor = [] { return std::make_unique<FaithfulExtractor>(); };
    auto log = std::make_shared<chat::RawLog>();
    res.log = log;
    return Scripted{play_game(settings, std::move(res), 1, seed), log};
}

std::vector<std::string> user_texts(const std::vector<chat::ChatMessage>& t) {
    std::vector<std::string> out;
    for (const auto& m : t)
        if (m.role == chat::Role::User) out.push_back(m.visible());
    return out;
}

Manifest synthetic_manifest(int games, std::uint64_t seed) {
    Manifest m;
    m.engine.path = std::string(kBuiltinEngine);
    m.games = games;
    m.seed = seed;
    SyntheticProfile p;
    p.p_offend = 0.3;
    p.p_continue = 0.6;
    p.p_repeat = 0.4;
    p.style = ResponseStyle::Sentence;
    m.adapter.synthetic.profiles = {p};
    m.move_cap = 30;
    return m;
}

std::string dump_all(const std::vector<GameRecord>& rs) {
    std::string out;
    for (const auto& r : rs) out += nlohmann::json(r).dump() + "\n";
    return out;
}

}  // namespace

TEST_CASE("scripted mate in two ends by checkmate") {
    ForcedEngine eng;
    eng.force({"e4", "g5"}, "d4");
    eng.force({"e4", "g5", "d4", "f6"}, "Qh5#");
    const auto s = run_scripted("Baseline", "\"g5\"\n\"f6\"\n", eng, seed_for_opening("e4"));
    const GameRecord& g = s.out.record;
    CHECK(g.termination == Termination::Checkmate);
    CHECK(g.n() == 2);
    CHECK(g.result() == "1-0");
    CHECK(g.sans() == std::vector<std::string>{"e4", "g5", "d4", "f6", "Qh5#"});
    CHECK(g.evaluations.size() == 2);
    CHECK(g.moves[0].p() == 0);
    CHECK(audit({g}).ok());

    const auto users = user_texts(s.out.transcript);
    REQUIRE(users.size() == 2);
    CHECK(users[0] == prompt::initial_prompt(prompt::builtin_variation("Baseline"), "e4", board_after({"e4"})).text);
    CHECK(users[0].substr(users[0].size() - 4) == "\n\ne4");
    CHECK(users[1] == "Move: d4");
}

TEST_CASE("ten illegal responses end the game by illegal-limit") {
    ForcedEngine eng;
    const auto s = run_scripted("Baseline", "\"Ke2\"\n", eng, 7);
    const GameRecord& g = s.out.record;
    CHECK(g.termination == Termination::IllegalLimit);
    CHECK(g.n() == 0);
    REQUIRE(g.moves.size() == 1);
    CHECK(g.moves[0].attempts.size() == 10);
    CHECK_FALSE(g.moves[0].legal());
    CHECK(g.moves[0].r() == 10);
    CHECK(g.moves[0].p() == 1);
    CHECK(g.evaluations.empty());
    CHECK(g.result() == "*");
    CHECK(s.out.rejected.size() == 9);  // resampled in place
    for (const auto& a : g.moves[0].attempts) CHECK(a.verdict == chess::SanVerdict::Illegal);
    CHECK(audit({g}).ok());
}

TEST_CASE("attempt pattern gives P and r") {
    ForcedEngine eng;
    const auto s = run_scripted("Baseline", "[\"Ke2\", \"e5\"]\n\"Nc6\"\n", eng, seed_for_opening("d4"), 2);
    const GameRecord& g = s.out.record;
    CHECK(g.termination == Termination::MoveCap);
    REQUIRE(g.moves.size() == 2);
    CHECK(g.moves[0].p() == 1);
    CHECK(g.moves[0].r() == 1);
    CHECK(g.moves[1].p() == 0);
    CHECK(g.moves[1].r() == 0);
    CHECK(g.moves[0].attempts[0].verdict == chess::SanVerdict::Illegal);
    CHECK(*g.moves[0].final_san == "e5");
    CHECK(g.plies.size() == 4);  // capped before white's reply
    CHECK(audit({g}).ok());
}

TEST_CASE("not-a-move and ambiguous answers are recorded with their verdicts") {
    ForcedEngine eng;
    eng.force({"e4", "Nf6"}, "d3");
    eng.force({"e4", "Nf6", "d3", "Nc6"}, "c3");
    const auto s = run_scripted("Baseline", "\"Nf6\"\n\"Nc6\"\n[\"I resign\", \"Nb4\", \"Ne5\"]\n", eng,
                                seed_for_opening("e4"), 3);
    const GameRecord& g = s.out.record;
    REQUIRE(g.moves.size() == 3);
    const auto& m3 = g.moves[2].attempts;
    REQUIRE(m3.size() == 2);
    CHECK(m3[0].verdict == chess::SanVerdict::NotAMove);
    CHECK_FALSE(m3[0].candidate.has_value());
    CHECK(m3[1].verdict == chess::SanVerdict::Legal);
    CHECK(*g.moves[2].final_san == "Nb4");
    CHECK(audit({g}).ok());

    chess::Board amb = chess::Board::from_fen("4k3/8/8/8/8/2N3N1/8/4K3 w - - 0 1");
    CHECK(chess::classify_san(amb, "Ne2").verdict == chess::SanVerdict::Ambiguous);
}

TEST_CASE("reminder-append names the illegal moves so far") {
    ForcedEngine eng;
    const auto s = run_scripted("Move-IlgRem", "\"b2\"\n\"c3\"\n\"b2\"\n\"e5\"\n", eng, seed_for_opening("e4"), 1);
    const GameRecord& g = s.out.record;
    REQUIRE(g.moves.size() == 1);
    CHECK(g.moves[0].attempts.size() == 4);
    CHECK(g.moves[0].r() == 3);
    const auto users = user_texts(s.out.transcript);
    REQUIRE(users.size() == 4);
    CHECK(users[1] == "Move: e4 (moves b2 are illegal).");
    CHECK(users[2] == "Move: e4 (moves b2, c3 are illegal).");
    CHECK(users[3] == "Move: e4 (moves b2, c3 are illegal).");
    // Illegal answers stay in the conversation.
    CHECK(s.out.transcript.size() == 8);
    CHECK(s.out.rejected.empty());
}

TEST_CASE("move prompts carry previous moves for Move-Repeat") {
    ForcedEngine eng;
    eng.force({"e4", "e5"}, "Nf3");
    const auto s = run_scripted("Move-Repeat", "\"e5\"\n\"Nc6\"\n", eng, seed_for_opening("e4"), 2);
    const auto users = user_texts(s.out.transcript);
    REQUIRE(users.size() == 2);
    CHECK(users[1] == "Move: Nf3, Previous Moves: 1. e4 e5 2. Nf3");
}

TEST_CASE("description variation condenses all but the newest board description") {
    ForcedEngine eng;
    eng.force({"e4", "e5"}, "Nf3");
    eng.force({"e4", "e5", "Nf3", "Nc6"}, "Bb5");
    const auto s = run_scripted("Dsc-Base", "\"e5\"\n\"Nc6\"\n\"a6\"\n", eng, seed_for_opening("e4"), 3);
    int full = 0, condensed = 0;
    for (const auto& m : s.out.transcript) {
        if (m.annotation != chat::Annotation::Description) continue;
        (m.condensed ? condensed : full)++;
    }
    CHECK(full == 1);
    CHECK(condensed == 1);
    const auto& last = s.out.transcript[s.out.transcript.size() - 2];
    CHECK(last.content.rfind("Move: Bb5\n\nAfter my move, the board state is a follows:\n", 0) == 0);
    CHECK(s.out.transcript[2].visible() == "Move: Nf3");
}

TEST_CASE("chain-of-thought prefix is injected until the model opens with it") {
    ForcedEngine eng;
    eng.force({"e4", "e5"}, "Nf3");
    eng.force({"e4", "e5", "Nf3", "Nc6"}, "Bb5");
    const std::string script =
        "\"The centre matters, so e5\"\n"
        "\"Let's think step by step. Develop with Nc6\"\n"
        "\"Then a6 asks the bishop.\"\n";
    const auto s = run_scripted("Rsn-CoT", script, eng, seed_for_opening("e4"), 3);
    std::vector<std::string> replies;
    for (const auto& m : s.out.transcript)
        if (m.role == chat::Role::Assistant) replies.push_back(m.content);
    REQUIRE(replies.size() == 3);
    CHECK(replies[0] == "Let's think step by step. The centre matters, so e5");
    CHECK(replies[1] == "Let's think step by step. Let's think step by step. Develop with Nc6");
    CHECK(replies[2] == "Then a6 asks the bishop.");  // previous continuation echoed the phrase
    CHECK(s.out.record.n() == 3);
    CHECK(s.out.record.moves[0].attempts[0].method == "llm-assisted");
}

TEST_CASE("refusals count as not-a-move attempts") {
    ForcedEngine eng;
    const auto s = run_scripted("Baseline", "{\"error\":\"refusal\"}\n\"e5\"\n", eng, seed_for_opening("e4"), 1);
    const GameRecord& g = s.out.record;
    REQUIRE(g.moves.size() == 1);
    REQUIRE(g.moves[0].attempts.size() == 2);
    CHECK(g.moves[0].attempts[0].refusal);
    CHECK(g.moves[0].attempts[0].verdict == chess::SanVerdict::NotAMove);
    CHECK(g.moves[0].r() == 1);
    CHECK(g.termination == Termination::MoveCap);
    CHECK(audit({g}).ok());
}

TEST_CASE("transport failure ends the game and is recorded") {
    ForcedEngine eng;
    const auto s = run_scripted("Baseline", "\"e5\"\n{\"error\":\"transport\"}\n", eng, seed_for_opening("e4"));
    const GameRecord& g = s.out.record;
    CHECK(g.termination == Termination::TransportFailure);
    CHECK_FALSE(g.failure.empty());
    CHECK(g.n() == 1);
    CHECK(g.moves.size() == 1);
    CHECK(g.retries == 1);
    CHECK(audit({g}).ok());
    bool logged = false;
    for (const auto& e : s.log->entries())
        if (e.value("event", "") == "failure") logged = true;
    CHECK(logged);
}

TEST_CASE("records survive a JSON round trip") {
    ForcedEngine eng;
    const auto s = run_scripted("Baseline", "[\"Ke2\", \"e5\"]\n\"Nc6\"\n", eng, seed_for_opening("d4"), 2);
    const nlohmann::json j = s.out.record;
    const auto back = j.get<GameRecord>();
    CHECK(nlohmann::json(back) == j);
    CHECK(j.at("n") == 2);
    nlohmann::json bad = j;
    bad["n"] = 5;
    CHECK_THROWS_AS(bad.get<GameRecord>(), RecordError);
    bad = j;
    bad["termination"] = "resigned";
    CHECK_THROWS_AS(bad.get<GameRecord>(), RecordError);
}

TEST_CASE("audit flags tampered verdicts and plies") {
    ForcedEngine eng;
    const auto s = run_scripted("Baseline", "[\"Ke2\", \"e5\"]\n\"Nc6\"\n", eng, seed_for_opening("d4"), 2);
    GameRecord g = s.out.record;
    g.moves[0].attempts[0].verdict = chess::SanVerdict::Ambiguous;
    auto report = audit({g});
    CHECK(report.verdict_mismatches == 1);
    CHECK(report.attempts == 3);

    g = s.out.record;
    g.plies[1].san = "e6";
    CHECK_FALSE(audit({g}).ok());

    g = s.out.record;
    g.termination = Termination::IllegalLimit;
    CHECK_FALSE(audit({g}).ok());

    g = s.out.record;
    g.evaluations.pop_back();
    CHECK_FALSE(audit({g}).ok());
}

TEST_CASE("synthetic plans") {
    const auto board = chess::Board::initial();
    SyntheticProfile p;
    p.plan[1] = MovePlan{{"Ka1", "Ka1", "Kb1"}, false};
    p.plan[2] = MovePlan{{"Ka1", "Kb1"}, true};
    const auto r1 = plan_responses(p, 1, board, 1);
    CHECK(r1.size() == 4);
    CHECK(r1[2] == "Kb1");
    CHECK(chess::classify_san(board, r1[3]).verdict == chess::SanVerdict::Legal);
    const auto r2 = plan_responses(p, 1, board, 2);
    CHECK(r2.size() == 10);
    CHECK(r2[9] == "Kb1");

    SyntheticProfile noisy;
    noisy.p_offend = 1.0;
    noisy.p_continue = 0.5;
    noisy.p_garbage = 0.0;
    for (int j = 1; j <= 50; ++j) {
        const auto r = plan_responses(noisy, 99, board, j);
        CHECK(r.size() >= 2);
        CHECK(r == plan_responses(noisy, 99, board, j));
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            CHECK(chess::classify_san(board, r[i]).verdict != chess::SanVerdict::Legal);
    }
    const nlohmann::json j = p;
    CHECK(nlohmann::json(j.get<SyntheticProfile>()) == j);
}

TEST_CASE("synthetic experiments are deterministic across runs and thread counts") {
    auto m = synthetic_manifest(12, 42);
    const auto a = run_experiment(m);
    const auto b = run_experiment(m);
    CHECK(dump_all(a) == dump_all(b));
    m.parallelism = 4;
    const auto c = run_experiment(m);
    CHECK(dump_all(a) == dump_all(c));
    CHECK(audit(a).ok());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].game_id == i + 1);

    m.seed = 43;
    CHECK(dump_all(run_experiment(m)) != dump_all(a));
}

TEST_CASE("ordered sink sees games in id order") {
    struct Sink final : GameSink {
        std::vector<std::uint64_t> ids;
        void write(const GameOutput& g) override { ids.push_back(g.record.game_id); }
    } sink;
    auto m = synthetic_manifest(16, 5);
    m.parallelism = 8;
    RunOptions opts;
    opts.sink = &sink;
    run_experiment(m, opts);
    REQUIRE(sink.ids.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) CHECK(sink.ids[i] == i + 1);
}

TEST_CASE("opening distribution over 4000 games") {
    auto m = synthetic_manifest(4000, 2024);
    m.move_cap = 1;
    m.parallelism = 4;
    std::map<std::string, int> counts;
    for (const auto& r : run_experiment(m)) ++counts[r.opening];
    REQUIRE(counts.size() == 4);
    for (const auto& [opening, n] : counts) CHECK(std::abs(n / 4000.0 - 0.25) <= 0.025);
}

TEST_CASE("fake UCI engine games audit cleanly") {
    auto m = synthetic_manifest(3, 11);
    m.engine.path = LLMCHESS_FAKE_ENGINE;
    m.engine.limit = engine::SearchLimit::depth(1);
    m.parallelism = 3;
    test::TempDir dir("orch-raw");
    RunOptions opts;
    opts.raw_dir = dir.path();
    const auto rs = run_experiment(m, opts);
    CHECK(audit(rs).ok());
    for (const auto& r : rs) {
        CHECK(r.engine == "FakeMaterial 1.0");
        CHECK(std::filesystem::exists(dir.path() / ("game-" + std::to_string(r.game_id) + ".jsonl")));
    }
    // Same ranking in process and behind UCI, so the builtin engine plays identical games.
    m.engine.path = std::string(kBuiltinEngine);
    auto builtin = run_experiment(m);
    for (std::size_t i = 0; i < rs.size(); ++i) CHECK(builtin[i].sans() == rs[i].sans());
}

TEST_CASE("manifest loading") {
    test::TempDir dir("manifest");
    std::filesystem::create_directories(dir.path() / "scripts");
    {
        std::ofstream(dir.path() / "scripts" / "default.jsonl") << "\"e5\"\n";
        std::ofstream(dir.path() / "m.json") << R"({
            "version": 1, "variation": "Move-IlgRem", "games": 2, "seed": 9, "move_cap": 1,
            "engine": {"path": "builtin:material"},
            "adapter": {"kind": "mock", "mock_script": "scripts", "retry": {"max_retries": 0}}
        })";
        std::ofstream(dir.path() / "bad.json") << R"({"version": 2})";
    }
    const auto m = Manifest::load(dir.path() / "m.json");
    CHECK(m.variation.id == "Move-IlgRem");
    CHECK(m.adapter.mock_script == dir.path() / "scripts");
    CHECK(m.adapter.retry.max_retries == 0);
    const auto rs = run_experiment(m);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].termination == Termination::MoveCap);

    const nlohmann::json j = m;
    CHECK(j.at("config_hash") == prompt::config_hash(m.variation));
    CHECK(j.at("fixtures").contains("rules_summary"));
    CHECK(j.get<Manifest>().variation == m.variation);
    CHECK_THROWS_AS(Manifest::load(dir.path() / "bad.json"), ManifestError);
    CHECK_THROWS_AS(Manifest::load(dir.path() / "missing.json"), ManifestError);

    Manifest none = m;
    none.adapter.mock_script = dir.path() / "nowhere";
    CHECK_THROWS(run_experiment(none));
}

TEST_CASE("probe truncation") {
    CHECK(truncation_plies(0.5, 10) == 5);
    CHECK(truncation_plies(0.3, 10) == 3);
    CHECK(truncation_plies(0.4, 10) == 3);  // 4 leaves white to move
    CHECK(truncation_plies(0.7, 10) == 7);
    CHECK(truncation_plies(0.5, 2) == 1);
    CHECK(truncation_plies(0.3, 2) == 1);

    std::vector<GameRecord> records;
    for (std::uint64_t id = 1; id <= 30; ++id) {
        GameRecord g;
        g.game_id = id;
        for (int i = 0; i < static_cast<int>(id); ++i) g.plies.push_back({"x", chess::Color::White});
        records.push_back(g);
    }
    ProbeSettings ps;
    ps.sample = 20;
    ps.seed = 3;
    const auto cuts = plan_probe(records, ps);
    REQUIRE(cuts.size() == 20);
    std::set<std::uint64_t> ids;
    for (const auto& c : cuts) {
        ids.insert(c.game_id);
        CHECK(c.game_id >= 2);
        CHECK(c.fraction >= 0.3);
        CHECK(c.fraction <= 0.7);
        CHECK(c.truncated_plies % 2 == 1);
        CHECK(c.truncated_plies < c.original_plies);
    }
    CHECK(ids.size() == 20);
    CHECK(plan_probe(records, ps).front().fraction == cuts.front().fraction);
}

TEST_CASE("probe scoring") {
    const auto after_e4 = board_after({"e4"});
    const auto ranked = engine::MaterialEngine::rank_all(after_e4);
    const std::string second = chess::format_san(after_e4, ranked[1].move);
    const std::string fifth = chess::format_san(after_e4, ranked[4].move);

    GameRecord g;
    g.game_id = 4;
    g.plies = {{"e4", chess::Color::White}, {second, chess::Color::Black}};
    const chess::Board after_two = chess::apply_move(after_e4, ranked[1].move);
    g.plies.push_back({chess::format_san(after_two, chess::legal_moves(after_two).front()), chess::Color::White});
    const ProbeCut cut{4, 0.5, 3, 1};
    engine::MaterialEngine eng;

    auto p = score_probe(g, cut, "I would answer with " + second + ".", eng);
    CHECK(p.suggestions == std::vector<std::string>{second});
    CHECK(p.alignment);
    CHECK(p.suggestions_valid);
    CHECK(p.engine_top.size() == 4);
    CHECK(p.next_move == second);

    p = score_probe(g, cut, "Play " + fifth, eng);
    CHECK_FALSE(p.suggestions_valid);
    CHECK_FALSE(p.alignment);

    p = score_probe(g, cut, "There is nothing good here.", eng);
    CHECK(p.suggestions.empty());
    CHECK_FALSE(p.alignment);
    CHECK_FALSE(p.suggestions_valid);

    CHECK(suggested_moves("Nf6 or Nf6+, maybe d5.") == std::vector<std::string>{"Nf6", "d5"});
}

TEST_CASE("run_probe with a synthetic player") {
    auto m = synthetic_manifest(6, 77);
    const auto rs = run_experiment(m);
    ProbeSettings ps;
    ps.sample = 4;
    ps.seed = 1;
    auto feed = std::make_shared<PositionFeed>();
    engine::MaterialEngine eng;
    const auto probes = run_probe(
        rs, ps, eng,
        [&](const ProbeCut& c) {
            return std::make_unique<SyntheticPlayer>(m.adapter.synthetic.for_game(c.game_id), c.game_id, feed);
        },
        feed);
    REQUIRE(probes.size() == 4);
    for (const auto& p : probes) {
        CHECK(p.failure.empty());
        REQUIRE_FALSE(p.suggestions.empty());
        // The synthetic player names the greedy move first, which is the engine's first choice.
        CHECK(p.suggestions.front() == p.engine_top.front());
        const nlohmann::json j = p;
        CHECK(nlohmann::json(j.get<ProbeRecord>()) == j);
    }
}

TEST_CASE("shipped manifests load") {
    for (const char* name : {"mock-baseline.json", "stockfish-mock.json", "live-baseline.json"}) {
        CAPTURE(name);
        const auto m = Manifest::load(std::filesystem::path(LLMCHESS_SOURCE_DIR) / "manifests" / name);
        CHECK(m.games > 0);
    }
    const auto live = Manifest::load(std::filesystem::path(LLMCHESS_SOURCE_DIR) / "manifests" / "live-baseline.json");
    CHECK(live.adapter.kind == AdapterSpec::Kind::Live);
    CHECK(live.engine.limit.value == 200000);
}
