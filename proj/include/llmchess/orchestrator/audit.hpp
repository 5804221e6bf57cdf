#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "llmchess/chess/board.hpp"
#include "llmchess/orchestrator/records.hpp"

namespace llmchess::orchestrator {

/// Positions of a game from the start position: element k follows k plies.
/// Throws RecordError when a ply does not parse as a legal move.
std::vector<chess::Board> replay_positions(const GameRecord& record);

struct AuditIssue {
    std::uint64_t game_id = 0;
    int move = 0;     // model move index, 0 for game-level issues
    int attempt = -1; // attempt index within the move, -1 when not attempt-specific
    std::string what;
};

struct AuditReport {
    int games = 0;
    int attempts = 0;
    int verdict_mismatches = 0;
    std::vector<AuditIssue> issues;

    bool ok() const noexcept { return issues.empty(); }
};

/// Replays every game and re-judges every recorded attempt against the
/// position it was made in, then checks the record invariants (attempt
/// counts, the single trailing legal attempt, final SANs against the ply
/// list, evaluation count, termination consistency).
AuditReport audit(const std::vector<GameRecord>& records);

}  // namespace llmchess::orchestrator
