#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmchess/chess/board.hpp"
#include "llmchess/chess/move.hpp"

namespace llmchess::chess {

/// How a piece of move text relates to a position.
enum class SanVerdict { Legal, Illegal, Ambiguous, NotAMove };

std::string_view verdict_name(SanVerdict v) noexcept;  // "legal", "illegal", "ambiguous", "not-a-move"
std::optional<SanVerdict> verdict_from_name(std::string_view name) noexcept;

/// Structural decomposition of a SAN token, independent of any position.
struct SanShape {
    bool castle = false;
    CastleSide castle_side = CastleSide::None;
    PieceType piece = PieceType::Pawn;
    std::optional<int> from_file;
    std::optional<int> from_rank;
    bool capture_marker = false;
    Square to;
    PieceType promotion = PieceType::None;
};

/// Strips surrounding whitespace and trailing decorations: check/mate
/// markers, "!"/"?" annotations, "e.p." and trailing punctuation.
std::string normalize_san(std::string_view text);

/// Grammar-only parse of an already normalized token. Piece letters are
/// case-sensitive; castling accepts both "O-O" and "0-0" spellings.
std::optional<SanShape> parse_san_shape(std::string_view normalized);

inline bool is_san_shaped(std::string_view text) { return parse_san_shape(normalize_san(text)).has_value(); }

struct SanResolution {
    SanVerdict verdict = SanVerdict::NotAMove;
    std::optional<Move> move;     // set iff verdict == Legal
    std::vector<Move> matches;    // every legal move the text could denote
};

/// Non-throwing resolution of move text against a position.
SanResolution classify_san(const Board& board, std::string_view text);

class SanError : public ChessError {
public:
    SanError(SanVerdict kind, const std::string& what) : ChessError(what), kind_(kind) {}
    SanVerdict kind() const noexcept { return kind_; }

private:
    SanVerdict kind_;
};

/// Returns the unique legal move denoted by `text`; throws SanError whose
/// kind() is Illegal, Ambiguous or NotAMove otherwise.
Move parse_san(const Board& board, std::string_view text);

/// Minimal SAN with disambiguation only when required and a "+"/"#" suffix.
/// Throws IllegalMoveError when `move` is not legal on `board`.
std::string format_san(const Board& board, const Move& move);

}  // namespace llmchess::chess
