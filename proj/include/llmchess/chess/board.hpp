#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmchess/chess/types.hpp"

namespace llmchess::chess {

struct CastlingRights {
    bool white_kingside = false;
    bool white_queenside = false;
    bool black_kingside = false;
    bool black_queenside = false;

    bool kingside(Color c) const noexcept { return c == Color::White ? white_kingside : black_kingside; }
    bool queenside(Color c) const noexcept { return c == Color::White ? white_queenside : black_queenside; }
    bool any() const noexcept { return white_kingside || white_queenside || black_kingside || black_queenside; }

    friend bool operator==(const CastlingRights&, const CastlingRights&) = default;
};

class FenError : public ChessError {
public:
    using ChessError::ChessError;
};

/// A complete chess position. Plain value type, 80 bytes, cheap to copy.
class Board {
public:
    Board() = default;

    static Board initial();
    /// Parses a standard 6-field FEN (the two clock fields may be omitted).
    /// Throws FenError on malformed text or a position violating the board invariants.
    static Board from_fen(std::string_view fen);

    std::string fen() const;

    Piece at(Square s) const noexcept { return squares_[s.index()]; }
    Color side_to_move() const noexcept { return side_; }
    const CastlingRights& castling() const noexcept { return castling_; }
    std::optional<Square> en_passant() const noexcept { return ep_; }
    int halfmove_clock() const noexcept { return halfmove_; }
    int fullmove_number() const noexcept { return fullmove_; }

    std::optional<Square> king_square(Color c) const noexcept;
    int count(Color c, PieceType t) const noexcept;
    int piece_count() const noexcept;

    /// Human-readable invariant violations; empty for a valid position.
    std::vector<std::string> invariant_violations() const;

    // Raw mutators for move application and fixture construction.
    // They do not re-check invariants.
    void set(Square s, Piece p) noexcept { squares_[s.index()] = p; }
    void clear(Square s) noexcept { squares_[s.index()] = Piece{}; }
    void set_side_to_move(Color c) noexcept { side_ = c; }
    void set_castling(const CastlingRights& r) noexcept { castling_ = r; }
    void set_en_passant(std::optional<Square> s) noexcept { ep_ = s; }
    void set_clocks(int halfmove, int fullmove) noexcept {
        halfmove_ = halfmove;
        fullmove_ = fullmove;
    }

    friend bool operator==(const Board&, const Board&) = default;

private:
    std::array<Piece, 64> squares_{};
    Color side_ = Color::White;
    CastlingRights castling_{};
    std::optional<Square> ep_{};
    int halfmove_ = 0;
    int fullmove_ = 1;
};

/// Repetition identity: placement, side to move, castling rights and an
/// en-passant square only when an en-passant capture is actually legal.
struct PositionKey {
    std::array<Piece, 64> squares{};
    Color side = Color::White;
    CastlingRights castling{};
    std::optional<Square> ep{};

    friend bool operator==(const PositionKey&, const PositionKey&) = default;
};

PositionKey position_key(const Board& board);

}  // namespace llmchess::chess
