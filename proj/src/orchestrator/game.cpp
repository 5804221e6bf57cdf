#include "llmchess/orchestrator/game.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"
#include "llmchess/chess/status.hpp"
#include "llmchess/extract/extractor.hpp"
#include "llmchess/prompt/templates.hpp"
#include "llmchess/rng.hpp"

namespace llmchess::orchestrator {

namespace {

using chat::Annotation;
using chat::ChatMessage;

bool uses_description(std::string_view tpl) {
    const auto names = prompt::placeholders(tpl);
    return std::find(names.begin(), names.end(), "description") != names.end();
}

std::string_view trim_left(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t')) s.remove_prefix(1);
    return s;
}

ChatMessage prompt_message(const prompt::Prompt& p, Annotation plain, bool describes) {
    ChatMessage m = ChatMessage::user(p.text, describes ? Annotation::Description : plain);
    if (describes) m.summary = p.summary;
    return m;
}

class Game {
public:
    Game(const GameSettings& settings, GameResources& res, std::uint64_t game_id, std::uint64_t seed)
        : s_(settings),
          v_(settings.variation),
          res_(res),
          rng_(seed),
          session_(chat::create_session(settings.sampling, std::move(res.player), settings.retry, res.log)) {
        rec_.game_id = game_id;
        rec_.variation = v_.id;
        rec_.config_hash = settings.config_hash.empty() ? prompt::config_hash(v_) : settings.config_hash;
        rec_.seed = seed;
        rec_.engine = res.engine_name;
        rec_.transcript_ref = fmt::format("game-{}", game_id);
        base_.annotation = v_.reasoning != prompt::ReasoningMode::None ? std::optional(Annotation::Reasoning)
                                                                         : std::nullopt;
        if (v_.history.kind != chat::HistoryPolicy::Kind::KeepAll) base_.prune_before = v_.history;
    }

    GameOutput run() {
        board_ = chess::Board::initial();
        history_ = {board_};
        rec_.opening = engine::sample_opening(rng_);
        log_event({{"event", "game-start"},
                   {"game_id", rec_.game_id},
                   {"seed", rec_.seed},
                   {"variation", v_.id},
                   {"opening", rec_.opening}});
        play_ply(chess::parse_san(board_, rec_.opening), chess::Color::White);

        const prompt::Prompt initial = prompt::initial_prompt(v_, rec_.opening, board_);
        if (v_.initial_role == chat::Role::System) {
            const auto follow = prompt::move_prompt(v_, rec_.opening, sans_, board_);
            pending_ = {ChatMessage::system(initial.text, Annotation::InitialPrompt),
                        prompt_message(follow, Annotation::MovePrompt, uses_description(v_.move_template))};
        } else {
            pending_ = {ChatMessage::user(initial.text, Annotation::InitialPrompt)};
        }
        engine_move_ = rec_.opening;

        for (int j = 1; !termination_; ++j) model_turn(j);

        rec_.termination = *termination_;
        rec_.retries = session_.total_retries();
        log_event({{"event", "game-end"}, {"termination", termination_name(rec_.termination)}, {"n", rec_.n()}});
        return GameOutput{std::move(rec_), session_.transcript(), session_.rejected()};
    }

private:
    void log_event(nlohmann::json entry) {
        if (res_.log) res_.log->append(std::move(entry));
    }

    void play_ply(const chess::Move& move, chess::Color mover) {
        const std::string san = chess::format_san(board_, move);
        board_ = chess::apply_move(board_, move);
        history_.push_back(board_);
        sans_.push_back(san);
        rec_.plies.push_back({san, mover});
    }

    bool end_if_over() {
        const auto status = chess::game_status(board_, history_);
        termination_ = termination_from_status(status);
        return termination_.has_value();
    }

    void fail(const std::string& what) {
        termination_ = Termination::TransportFailure;
        rec_.failure = what;
        log_event({{"event", "failure"}, {"error", what}});
    }

    // One model request for attempt k; returns the stored assistant text.
    std::string request(int k, const std::vector<std::string>& illegal) {
        chat::CompleteOptions opts = base_;
        if (v_.cot_prefix && !cot_echoed_) opts.assistant_prefix = *v_.cot_prefix;

        const auto& t = session_.transcript();
        const bool awaiting = !t.empty() && t.back().role == chat::Role::User;
        std::string text;
        if (k == 0) {
            text = session_.complete(pending_, opts);
        } else if (awaiting) {
            text = session_.complete({}, opts);  // the previous request was refused
        } else if (v_.regeneration == prompt::RegenerationMode::Resample) {
            text = session_.regenerate();
            return note_continuation(text, prefixed_);
        } else {
            const auto p = prompt::reminder_prompt(v_, engine_move_, sans_, board_, illegal);
            text = session_.complete({prompt_message(p, Annotation::Reminder, uses_description(v_.reminder_template))},
                                     opts);
        }
        prefixed_ = opts.assistant_prefix.has_value();
        return note_continuation(text, prefixed_);
    }

    // Stops injecting the reasoning prefix while the model already opens with it.
    std::string note_continuation(const std::string& text, bool prefixed) {
        if (!v_.cot_prefix) return text;
        std::string_view rest = text;
        if (prefixed) rest.remove_prefix(std::min(rest.size(), v_.cot_prefix->size()));
        cot_echoed_ = trim_left(rest).substr(0, v_.cot_prefix->size()) == *v_.cot_prefix;
        log_event({{"event", "cot-prefix"}, {"injected", prefixed}, {"echoed", cot_echoed_}});
        return text;
    }

    extract::ExtractionResult extract(const std::string& text) {
        if (v_.extraction == prompt::ExtractionMode::Direct) return extract::extract_direct(text);
        if (!res_.extractor) throw chat::AdapterConfigError("variation needs an extraction backend");
        chat::SamplingParams params = s_.sampling;
        params.temperature = 0.0;
        const extract::SessionFactory factory = [&] {
            return chat::create_session(params, res_.extractor(), s_.retry, res_.log);
        };
        try {
            return extract::extract_llm(text, factory);
        } catch (const chat::RefusalError&) {
            auto direct = extract::extract_direct(text);
            direct.method = extract::Method::LlmAssisted;
            direct.fallback = true;
            return direct;
        }
    }

    void model_turn(int j) {
        MoveAttemptLog log;
        log.index = j;
        log.fen = board_.fen();
        if (res_.feed) res_.feed->set(board_, sans_, j);

        std::vector<std::string> illegal;
        std::optional<chess::Move> chosen;
        try {
            for (int k = 0; k < kMaxAttempts && !chosen; ++k) {
                Attempt a;
                try {
                    a.raw = request(k, illegal);
                } catch (const chat::RefusalError&) {
                    a.refusal = true;
                    log.attempts.push_back(a);
                    log_event({{"event", "attempt"}, {"move", j}, {"attempt", k}, {"verdict", "not-a-move"},
                               {"refusal", true}});
                    continue;
                }
                const auto ex = extract(a.raw);
                a.candidate = ex.candidate;
                a.method = std::string(extract::method_name(ex.method));
                a.fallback = ex.fallback;
                if (a.candidate) {
                    const auto res = chess::classify_san(board_, *a.candidate);
                    a.verdict = res.verdict;
                    if (res.verdict == chess::SanVerdict::Legal) {
                        chosen = res.move;
                    } else if (std::find(illegal.begin(), illegal.end(), *a.candidate) == illegal.end()) {
                        illegal.push_back(*a.candidate);
                    }
                }
                log.attempts.push_back(a);
                log_event({{"event", "attempt"},
                           {"move", j},
                           {"attempt", k},
                           {"candidate", a.candidate ? nlohmann::json(*a.candidate) : nlohmann::json(nullptr)},
                           {"verdict", chess::verdict_name(a.verdict)}});
            }
        } catch (const chat::ChatError& e) {
            if (!log.attempts.empty()) rec_.moves.push_back(std::move(log));
            fail(e.what());
            return;
        }

        if (!chosen) {
            rec_.moves.push_back(std::move(log));
            termination_ = Termination::IllegalLimit;
            return;
        }
        log.final_san = chess::format_san(board_, *chosen);
        session_.set_last_summary(*log.final_san);
        rec_.moves.push_back(std::move(log));
        play_ply(*chosen, chess::Color::Black);

        try {
            const bool over = end_if_over();
            rec_.evaluations.push_back(res_.engine->evaluate(board_));
            if (over) return;
            if (rec_.n() >= s_.move_cap) {
                termination_ = Termination::MoveCap;
                return;
            }
            const auto reply = engine::sample_reply(*res_.engine, board_, rng_);
            play_ply(reply, chess::Color::White);
            engine_move_ = sans_.back();
            log_event({{"event", "engine-move"}, {"san", engine_move_}});
            if (end_if_over()) return;
        } catch (const engine::EngineError& e) {
            fail(std::string("engine: ") + e.what());
            return;
        }

        const auto p = prompt::move_prompt(v_, engine_move_, sans_, board_);
        pending_ = {prompt_message(p, Annotation::MovePrompt, uses_description(v_.move_template))};
    }

    const GameSettings& s_;
    const prompt::VariationConfig& v_;
    GameResources& res_;
    Rng rng_;
    chat::ChatSession session_;
    chat::CompleteOptions base_;
    GameRecord rec_;
    chess::Board board_ = chess::Board::initial();
    std::vector<chess::Board> history_;
    std::vector<std::string> sans_;
    std::vector<ChatMessage> pending_;
    std::string engine_move_;
    std::optional<Termination> termination_;
    bool cot_echoed_ = false;
    bool prefixed_ = false;
};

}  // namespace

GameOutput play_game(const GameSettings& settings, GameResources resources, std::uint64_t game_id,
                     std::uint64_t seed) {
    if (!resources.engine) throw std::invalid_argument("play_game needs an engine");
    if (settings.move_cap < 1) throw std::invalid_argument("move cap must be >= 1");
    settings.variation.validate();
    return Game(settings, resources, game_id, seed).run();
}

}  // namespace llmchess::orchestrator
