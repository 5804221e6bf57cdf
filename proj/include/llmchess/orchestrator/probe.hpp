#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "llmchess/chat/session.hpp"
#include "llmchess/engine/engine.hpp"
#include "llmchess/orchestrator/records.hpp"
#include "llmchess/orchestrator/synthetic.hpp"

namespace llmchess::orchestrator {

/// Probe question; {previous_moves} is the numbered movetext up to the cut.
inline constexpr std::string_view kProbeTemplate =
    "I want you to act as a skillful chess player. Here are the moves of a game so far: {previous_moves}\n\n"
    "It is black's turn. Find black's best move, give it in standard algebraic notation and explain your "
    "reasoning.";

struct ProbeSettings {
    int sample = 20;
    std::uint64_t seed = 0;
    double min_fraction = 0.3;
    double max_fraction = 0.7;
    int top_k = 4;
    std::string prompt_template = std::string(kProbeTemplate);
    chat::SamplingParams sampling;
    chat::RetryPolicy retry;
};

struct ProbeCut {
    std::uint64_t game_id = 0;
    double fraction = 0.0;
    int original_plies = 0;
    int truncated_plies = 0;
};

/// round(fraction * plies), minus one when that leaves white to move.
int truncation_plies(double fraction, int plies);

/// Draws min(sample, eligible) distinct games with at least two plies and a
/// fraction for each. Deterministic in (records, settings).
std::vector<ProbeCut> plan_probe(const std::vector<GameRecord>& records, const ProbeSettings& settings);

/// The probe prompt for a cut.
std::string probe_prompt(const ProbeSettings& settings, const GameRecord& record, const ProbeCut& cut);

/// Distinct SAN-shaped tokens of the response, in order of appearance.
std::vector<std::string> suggested_moves(std::string_view response);

/// Scores `response` for a cut: alignment and suggestions-valid against the
/// engine's top_k on the truncated position.
ProbeRecord score_probe(const GameRecord& record, const ProbeCut& cut, const std::string& response,
                        engine::Engine& engine, int top_k = 4);

using ProbeAdapterFactory = std::function<std::unique_ptr<chat::ChatAdapter>(const ProbeCut&)>;

/// Plans, asks one fresh session per cut and scores the answers. A chat
/// failure leaves that probe with an empty response, both flags false and
/// `failure` set.
std::vector<ProbeRecord> run_probe(const std::vector<GameRecord>& records, const ProbeSettings& settings,
                                   engine::Engine& engine, const ProbeAdapterFactory& adapters,
                                   const std::shared_ptr<PositionFeed>& feed = nullptr,
                                   const std::shared_ptr<chat::RawLog>& log = nullptr);

}  // namespace llmchess::orchestrator
