#include "llmchess/orchestrator/audit.hpp"

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"
#include "llmchess/chess/status.hpp"

namespace llmchess::orchestrator {

std::vector<chess::Board> replay_positions(const GameRecord& record) {
    std::vector<chess::Board> positions{chess::Board::initial()};
    for (std::size_t i = 0; i < record.plies.size(); ++i) {
        const auto& ply = record.plies[i];
        const chess::Board& b = positions.back();
        if (ply.mover != b.side_to_move())
            throw RecordError(fmt::format("game {}: ply {} ({}) is attributed to the wrong side", record.game_id,
                                          i + 1, ply.san));
        try {
            positions.push_back(chess::apply_move(b, chess::parse_san(b, ply.san)));
        } catch (const chess::ChessError& e) {
            throw RecordError(fmt::format("game {}: ply {} ({}) does not replay: {}", record.game_id, i + 1, ply.san,
                                          e.what()));
        }
    }
    return positions;
}

namespace {

void audit_game(const GameRecord& g, AuditReport& report) {
    auto issue = [&](int move, int attempt, std::string what) {
        report.issues.push_back({g.game_id, move, attempt, std::move(what)});
    };

    std::vector<chess::Board> positions;
    try {
        positions = replay_positions(g);
    } catch (const RecordError& e) {
        issue(0, -1, e.what());
        return;
    }
    if (g.plies.empty() || g.plies.front().san != g.opening) issue(0, -1, "first ply is not the recorded opening");

    const int n = g.n();
    for (std::size_t i = 0; i < g.moves.size(); ++i) {
        const MoveAttemptLog& log = g.moves[i];
        const int j = static_cast<int>(i) + 1;
        if (log.index != j) issue(j, -1, fmt::format("log index {} out of sequence", log.index));
        if (log.attempts.empty() || static_cast<int>(log.attempts.size()) > kMaxAttempts)
            issue(j, -1, fmt::format("{} attempts recorded", log.attempts.size()));
        if (!log.legal() && i + 1 != g.moves.size()) issue(j, -1, "a move without a legal attempt is not the last");

        const std::size_t before = 2 * i + 1;  // plies played before model move j
        if (before >= positions.size()) {
            issue(j, -1, "attempt log has no matching position in the ply list");
            continue;
        }
        const chess::Board& board = positions[before];
        if (log.fen != board.fen()) issue(j, -1, "recorded position differs from the replayed one");

        std::optional<chess::Move> legal_move;
        for (std::size_t k = 0; k < log.attempts.size(); ++k) {
            const Attempt& a = log.attempts[k];
            ++report.attempts;
            chess::SanVerdict judged = chess::SanVerdict::NotAMove;
            std::optional<chess::Move> move;
            if (a.candidate) {
                const auto res = chess::classify_san(board, *a.candidate);
                judged = res.verdict;
                move = res.move;
            }
            if (judged != a.verdict) {
                ++report.verdict_mismatches;
                issue(j, static_cast<int>(k),
                      fmt::format("recorded '{}' but re-judged '{}'", chess::verdict_name(a.verdict),
                                  chess::verdict_name(judged)));
            }
            if (a.legal()) {
                if (k + 1 != log.attempts.size()) issue(j, static_cast<int>(k), "legal attempt is not the last");
                legal_move = move;
            }
        }

        if (log.final_san.has_value() != (legal_move.has_value())) {
            issue(j, -1, "final SAN disagrees with the attempt verdicts");
        } else if (legal_move) {
            if (*log.final_san != chess::format_san(board, *legal_move))
                issue(j, -1, "final SAN does not denote the legal attempt");
            if (before >= g.plies.size() || g.plies[before].san != *log.final_san)
                issue(j, -1, "final SAN is not the next ply");
        }
    }

    const auto plies = static_cast<int>(g.plies.size());
    if (plies != 2 * n && plies != 2 * n + 1)
        issue(0, -1, fmt::format("{} plies for {} legal model moves", plies, n));

    const auto evals = static_cast<int>(g.evaluations.size());
    const bool evals_ok = evals == n || (g.termination == Termination::TransportFailure && evals == n - 1);
    if (!evals_ok) issue(0, -1, fmt::format("{} evaluations for {} legal model moves", evals, n));

    const bool exhausted = !g.moves.empty() && !g.moves.back().legal() &&
                           static_cast<int>(g.moves.back().attempts.size()) == kMaxAttempts;
    if ((g.termination == Termination::IllegalLimit) != exhausted)
        issue(0, -1, "illegal-limit termination does not match the final attempt log");

    const auto status = chess::game_status(positions.back(), positions);
    if (is_natural(g.termination)) {
        if (termination_from_status(status) != g.termination)
            issue(0, -1, fmt::format("recorded {} but the final position is {}", termination_name(g.termination),
                                     chess::status_name(status)));
    } else if (chess::is_terminal(status)) {
        issue(0, -1, fmt::format("game continued into a finished position ({})", chess::status_name(status)));
    }
}

}  // namespace

AuditReport audit(const std::vector<GameRecord>& records) {
    AuditReport report;
    for (const auto& g : records) {
        ++report.games;
        audit_game(g, report);
    }
    return report;
}

}  // namespace llmchess::orchestrator
