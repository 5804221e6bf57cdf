#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "llmchess/chat/session.hpp"
#include "llmchess/engine/engine.hpp"
#include "llmchess/orchestrator/records.hpp"
#include "llmchess/orchestrator/synthetic.hpp"
#include "llmchess/prompt/variation.hpp"

namespace llmchess::orchestrator {

/// Settings shared by every game of an experiment.
struct GameSettings {
    prompt::VariationConfig variation;
    std::string config_hash;  // computed from `variation` when empty
    chat::SamplingParams sampling;
    chat::RetryPolicy retry;
    int move_cap = kDefaultMoveCap;
};

/// Resources one game owns exclusively.
struct GameResources {
    engine::Engine* engine = nullptr;
    std::string engine_name;
    std::unique_ptr<chat::ChatAdapter> player;
    /// Backend for LLM-assisted extraction sessions; required only by
    /// variations that use it.
    chat::AdapterFactory extractor;
    std::shared_ptr<chat::RawLog> log;
    /// Updated before every model request; may be null.
    std::shared_ptr<PositionFeed> feed;
};

struct GameOutput {
    GameRecord record;
    std::vector<chat::ChatMessage> transcript;
    std::vector<chat::RejectedResponse> rejected;
};

/// Plays one game: white is the engine (opening drawn from the four
/// openings, later moves sampled from its top three), black is the model.
/// Chat transport failures and engine failures end the game with
/// termination transport-failure instead of throwing.
GameOutput play_game(const GameSettings& settings, GameResources resources, std::uint64_t game_id,
                     std::uint64_t seed);

}  // namespace llmchess::orchestrator
