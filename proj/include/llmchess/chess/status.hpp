#pragma once

#include <span>
#include <string_view>

#include "llmchess/chess/board.hpp"

namespace llmchess::chess {

enum class GameStatus {
    Ongoing,
    Checkmate,
    Stalemate,
    DrawFiftyMove,
    DrawThreefold,
    DrawInsufficientMaterial,
};

std::string_view status_name(GameStatus s) noexcept;  // "ongoing", "checkmate", "draw-fifty-move", ...

inline bool is_terminal(GameStatus s) noexcept { return s != GameStatus::Ongoing; }

bool insufficient_material(const Board& board) noexcept;

/// Classifies `board`. `history` holds the positions of the game so far; the
/// current position may or may not be its last element. Threefold repetition
/// and the fifty-move rule end the game automatically (no claim needed).
GameStatus game_status(const Board& board, std::span<const Board> history);

}  // namespace llmchess::chess
