#include "llmchess/orchestrator/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "llmchess/chess/san.hpp"
#include "llmchess/extract/extractor.hpp"
#include "llmchess/orchestrator/audit.hpp"
#include "llmchess/prompt/templates.hpp"
#include "llmchess/rng.hpp"

namespace llmchess::orchestrator {

namespace {

const GameRecord& find_record(const std::vector<GameRecord>& records, std::uint64_t id) {
    for (const auto& r : records)
        if (r.game_id == id) return r;
    throw RecordError(fmt::format("no record for game {}", id));
}

std::vector<std::string> first_plies(const GameRecord& record, int count) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) out.push_back(record.plies[i].san);
    return out;
}

}  // namespace

int truncation_plies(double fraction, int plies) {
    int t = static_cast<int>(std::lround(fraction * plies));
    if (t % 2 == 0) --t;  // even cut: white to move
    return std::max(t, 1);
}

std::vector<ProbeCut> plan_probe(const std::vector<GameRecord>& records, const ProbeSettings& settings) {
    if (settings.sample < 1) throw std::invalid_argument("probe sample must be >= 1");
    if (!(settings.min_fraction > 0.0 && settings.min_fraction <= settings.max_fraction && settings.max_fraction < 1.0))
        throw std::invalid_argument("probe fractions must satisfy 0 < min <= max < 1");

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].plies.size() >= 2) eligible.push_back(i);

    Rng rng(settings.seed);
    // Partial Fisher-Yates: the first `take` entries become the sample.
    const std::size_t take = std::min<std::size_t>(settings.sample, eligible.size());
    for (std::size_t i = 0; i < take; ++i) std::swap(eligible[i], eligible[i + rng.uniform_index(eligible.size() - i)]);

    std::vector<ProbeCut> cuts;
    for (std::size_t i = 0; i < take; ++i) {
        const GameRecord& g = records[eligible[i]];
        ProbeCut cut;
        cut.game_id = g.game_id;
        cut.fraction = rng.uniform_real(settings.min_fraction, settings.max_fraction);
        cut.original_plies = static_cast<int>(g.plies.size());
        cut.truncated_plies = truncation_plies(cut.fraction, cut.original_plies);
        cuts.push_back(cut);
    }
    return cuts;
}

std::string probe_prompt(const ProbeSettings& settings, const GameRecord& record, const ProbeCut& cut) {
    return prompt::render(settings.prompt_template,
                          {{"previous_moves", prompt::numbered_movetext(first_plies(record, cut.truncated_plies))}});
}

std::vector<std::string> suggested_moves(std::string_view response) {
    std::vector<std::string> out;
    std::vector<std::string> seen;
    for (auto& token : extract::san_tokens(response)) {
        std::string key = chess::normalize_san(token);
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(std::move(key));
        out.push_back(std::move(token));
    }
    return out;
}

ProbeRecord score_probe(const GameRecord& record, const ProbeCut& cut, const std::string& response,
                        engine::Engine& engine, int top_k) {
    if (cut.truncated_plies < 1 || cut.truncated_plies >= static_cast<int>(record.plies.size()))
        throw RecordError(fmt::format("game {}: cut at {} plies leaves no next move", record.game_id,
                                      cut.truncated_plies));
    const auto positions = replay_positions(record);
    const chess::Board& board = positions[cut.truncated_plies];

    ProbeRecord p;
    p.game_id = record.game_id;
    p.fraction = cut.fraction;
    p.original_plies = cut.original_plies;
    p.truncated_plies = cut.truncated_plies;
    p.fen = board.fen();
    p.next_move = record.plies[cut.truncated_plies].san;
    p.response = response;
    p.insight = response;
    p.suggestions = suggested_moves(response);

    const chess::Move next = chess::parse_san(board, p.next_move);
    std::vector<chess::Move> top;
    for (const auto& r : engine.top_moves(board, top_k)) {
        top.push_back(r.move);
        p.engine_top.push_back(chess::format_san(board, r.move));
    }

    p.suggestions_valid = !p.suggestions.empty();
    for (const auto& s : p.suggestions) {
        const auto res = chess::classify_san(board, s);
        const bool legal = res.verdict == chess::SanVerdict::Legal;
        if (legal && *res.move == next) p.alignment = true;
        if (!legal || std::find(top.begin(), top.end(), *res.move) == top.end()) p.suggestions_valid = false;
    }
    return p;
}

std::vector<ProbeRecord> run_probe(const std::vector<GameRecord>& records, const ProbeSettings& settings,
                                   engine::Engine& engine, const ProbeAdapterFactory& adapters,
                                   const std::shared_ptr<PositionFeed>& feed, const std::shared_ptr<chat::RawLog>& log) {
    std::vector<ProbeRecord> out;
    for (const ProbeCut& cut : plan_probe(records, settings)) {
        const GameRecord& g = find_record(records, cut.game_id);
        const std::string question = probe_prompt(settings, g, cut);
        if (feed) feed->set(replay_positions(g)[cut.truncated_plies], first_plies(g, cut.truncated_plies), 0);
        if (log) log->append({{"event", "probe"}, {"game_id", cut.game_id}, {"truncated_plies", cut.truncated_plies}});

        std::string response;
        std::string failure;
        try {
            auto session = chat::create_session(settings.sampling, adapters(cut), settings.retry, log);
            response = session.complete({chat::ChatMessage::user(question)});
        } catch (const chat::ChatError& e) {
            failure = e.what();
        }
        if (failure.empty()) {
            out.push_back(score_probe(g, cut, response, engine, settings.top_k));
        } else {
            ProbeRecord p = score_probe(g, cut, "", engine, settings.top_k);
            p.failure = failure;
            out.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace llmchess::orchestrator
