#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmchess/chat/adapter.hpp"
#include "llmchess/chess/board.hpp"

namespace llmchess::orchestrator {

/// Side channel from the game loop to a synthetic player: the position the
/// next request is about. A live model reads the position from the prompt.
class PositionFeed {
public:
    /// move_index is the model move about to be played (1-based), or 0 for
    /// a probe question.
    void set(chess::Board board, std::vector<std::string> plies, int move_index);

    const chess::Board& board() const noexcept { return board_; }
    const std::vector<std::string>& plies() const noexcept { return plies_; }
    int move_index() const noexcept { return move_index_; }
    std::uint64_t version() const noexcept { return version_; }

private:
    chess::Board board_ = chess::Board::initial();
    std::vector<std::string> plies_;
    int move_index_ = 0;
    std::uint64_t version_ = 0;
};

/// Scripted behaviour for one model move. Texts are sent verbatim.
struct MovePlan {
    std::vector<std::string> illegal;
    /// Never answer legally; the illegal texts cycle until the attempt budget is spent.
    bool give_up = false;
};

enum class LegalChoice { Greedy, Random };
enum class ResponseStyle { Plain, Sentence, Reasoning };

struct SyntheticProfile {
    double p_offend = 0.0;    // a move opens with an illegal attempt
    double p_continue = 0.5;  // another illegal attempt follows an illegal one
    double p_repeat = 0.3;    // an illegal attempt repeats an earlier one of the same move
    double p_garbage = 0.1;   // an illegal attempt names no move at all
    LegalChoice legal = LegalChoice::Greedy;
    ResponseStyle style = ResponseStyle::Plain;
    std::map<int, MovePlan> plan;  // keyed by model move index; overrides the random draw

    void validate() const;
};

/// Game g plays profiles[(g - 1) % size].
struct SyntheticPopulation {
    std::vector<SyntheticProfile> profiles{SyntheticProfile{}};

    const SyntheticProfile& for_game(std::uint64_t game_id) const;
};

void to_json(nlohmann::json& j, const MovePlan& p);
void from_json(const nlohmann::json& j, MovePlan& p);
void to_json(nlohmann::json& j, const SyntheticProfile& p);
void from_json(const nlohmann::json& j, SyntheticProfile& p);
void to_json(nlohmann::json& j, const SyntheticPopulation& p);
void from_json(const nlohmann::json& j, SyntheticPopulation& p);

/// Responses for one model move: the illegal texts in order, then the legal
/// one unless the move gives up. Deterministic in (profile, seed, board, index).
std::vector<std::string> plan_responses(const SyntheticProfile& profile, std::uint64_t seed, const chess::Board& board,
                                        int move_index);

/// Mock model driven by a SyntheticProfile. Each call for the same feed
/// version is the next attempt on that move.
class SyntheticPlayer final : public chat::ChatAdapter {
public:
    SyntheticPlayer(SyntheticProfile profile, std::uint64_t seed, std::shared_ptr<const PositionFeed> feed);

    std::string generate(const chat::AdapterRequest& request) override;
    bool supports_prefix() const override { return true; }
    std::string name() const override { return "mock-synthetic"; }

private:
    SyntheticProfile profile_;
    std::uint64_t seed_;
    std::shared_ptr<const PositionFeed> feed_;
    std::uint64_t seen_version_ = ~std::uint64_t{0};
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
};

/// Mock extraction backend: answers with the direct extractor's candidate
/// for the last user message, or "none".
class FaithfulExtractor final : public chat::ChatAdapter {
public:
    std::string generate(const chat::AdapterRequest& request) override;
    std::string name() const override { return "mock-extractor"; }
};

}  // namespace llmchess::orchestrator
