#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmchess/chess/san.hpp"
#include "llmchess/chess/status.hpp"
#include "llmchess/chess/types.hpp"

namespace llmchess::orchestrator {

class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxAttempts = 10;
inline constexpr int kDefaultMoveCap = 200;

enum class Termination {
    Checkmate,
    Stalemate,
    DrawFiftyMove,
    DrawThreefold,
    DrawInsufficientMaterial,
    IllegalLimit,
    MoveCap,
    TransportFailure,
};

std::string_view termination_name(Termination t) noexcept;  // "checkmate", "illegal-limit", ...
Termination termination_from_name(std::string_view name);   // throws RecordError
std::optional<Termination> termination_from_status(chess::GameStatus s) noexcept;

/// Ended by the rules of chess rather than by the harness.
bool is_natural(Termination t) noexcept;

struct Attempt {
    std::string raw;
    std::optional<std::string> candidate;
    chess::SanVerdict verdict = chess::SanVerdict::NotAMove;
    std::string method = "direct";  // extraction method
    bool fallback = false;          // LLM extractor answer was unusable
    bool refusal = false;           // backend refused; raw is empty

    bool legal() const noexcept { return verdict == chess::SanVerdict::Legal; }
};

struct MoveAttemptLog {
    int index = 0;    // model move number, 1-based
    std::string fen;  // position the attempts were judged against
    std::vector<Attempt> attempts;
    std::optional<std::string> final_san;

    bool legal() const noexcept { return final_san.has_value(); }
    /// Non-legal attempts before the legal one (all of them if none was legal).
    int r() const noexcept;
    int p() const noexcept { return r() > 0 || !legal() ? 1 : 0; }
};

struct Ply {
    std::string san;
    chess::Color mover = chess::Color::White;
};

struct GameRecord {
    std::uint64_t game_id = 0;
    std::string variation;
    std::string config_hash;
    std::string opening;
    std::uint64_t seed = 0;
    std::string engine;
    std::vector<Ply> plies;
    std::vector<MoveAttemptLog> moves;
    std::vector<int> evaluations;  // centipawns, white's view, after each legal model move
    Termination termination = Termination::TransportFailure;
    std::string failure;  // set for transport failures
    std::string transcript_ref;
    int retries = 0;  // transport retries spent by the player session

    /// n_i: model moves with a legal outcome.
    int n() const noexcept;
    /// PGN result token.
    std::string result() const;
    std::vector<std::string> sans() const;
};

struct ProbeRecord {
    std::uint64_t game_id = 0;
    double fraction = 0.0;
    int original_plies = 0;
    int truncated_plies = 0;
    std::string fen;
    std::string next_move;  // SAN the original game played from `fen`
    std::string response;
    std::vector<std::string> suggestions;
    std::vector<std::string> engine_top;  // SAN, best first
    bool alignment = false;
    bool suggestions_valid = false;
    std::string insight;
    std::string failure;
};

void to_json(nlohmann::json& j, const Attempt& a);
void from_json(const nlohmann::json& j, Attempt& a);
void to_json(nlohmann::json& j, const MoveAttemptLog& l);
void from_json(const nlohmann::json& j, MoveAttemptLog& l);
void to_json(nlohmann::json& j, const Ply& p);
void from_json(const nlohmann::json& j, Ply& p);
void to_json(nlohmann::json& j, const GameRecord& g);
void from_json(const nlohmann::json& j, GameRecord& g);
void to_json(nlohmann::json& j, const ProbeRecord& p);
void from_json(const nlohmann::json& j, ProbeRecord& p);

}  // namespace llmchess::orchestrator
