#pragma once

#include <string>

#include "llmchess/chess/types.hpp"

namespace llmchess::chess {

enum class CastleSide : std::uint8_t { None, Kingside, Queenside };

/// A fully resolved move. Flags are derived from the position it was
/// generated for; two moves generated for the same position compare equal
/// exactly when origin, destination and promotion agree.
struct Move {
    Square from;
    Square to;
    PieceType promotion = PieceType::None;
    PieceType moved = PieceType::None;
    bool capture = false;
    bool en_passant = false;
    bool double_push = false;
    CastleSide castle = CastleSide::None;

    /// Long-algebraic UCI form, e.g. "e2e4", "e7e8q".
    std::string uci() const;

    friend bool operator==(const Move&, const Move&) = default;
};

}  // namespace llmchess::chess
