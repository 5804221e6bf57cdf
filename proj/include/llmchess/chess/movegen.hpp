#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "llmchess/chess/board.hpp"
#include "llmchess/chess/move.hpp"

namespace llmchess::chess {

/// True when any piece of `by` attacks `target` (pseudo-attack; pins ignored).
bool is_attacked(const Board& board, Square target, Color by) noexcept;

/// Squares holding pieces of `by` that attack `target`, ordered a1 -> h8.
/// Pins are ignored; a king counts as attacking its neighbours.
std::vector<Square> attackers_of(const Board& board, Square target, Color by);

/// Squares attacked by the piece standing on `from` (empty square -> empty list).
std::vector<Square> attacked_by_piece(const Board& board, Square from);

bool in_check(const Board& board, Color c) noexcept;
inline bool in_check(const Board& board) noexcept { return in_check(board, board.side_to_move()); }

/// Every FIDE-legal move, in a deterministic generation order.
std::vector<Move> legal_moves(const Board& board);

/// Applies a move already known to be legal; no legality check.
Board apply_unchecked(const Board& board, const Move& move) noexcept;

/// Applies `move`, throwing IllegalMoveError unless it is a member of legal_moves(board).
Board apply_move(const Board& board, const Move& move);

/// Resolves a UCI string ("e2e4", "e7e8q") against the legal moves of `board`.
std::optional<Move> find_uci_move(const Board& board, std::string_view uci);

std::uint64_t perft(const Board& board, int depth);

}  // namespace llmchess::chess
