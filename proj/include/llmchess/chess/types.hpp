#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace llmchess::chess {

enum class Color : std::uint8_t { White, Black };

constexpr Color opposite(Color c) noexcept { return c == Color::White ? Color::Black : Color::White; }

std::string_view color_name(Color c) noexcept;  // "white" / "black"

enum class PieceType : std::uint8_t { None, Pawn, Knight, Bishop, Rook, Queen, King };

/// Upper-case SAN letter ('N', 'B', ...); pawns and None map to '\0'.
char piece_letter(PieceType t) noexcept;
std::optional<PieceType> piece_from_letter(char upper) noexcept;
std::string_view piece_name(PieceType t) noexcept;  // "pawn", "knight", ...

struct Piece {
    PieceType type = PieceType::None;
    Color color = Color::White;

    constexpr bool empty() const noexcept { return type == PieceType::None; }
    friend constexpr bool operator==(Piece, Piece) = default;
};

/// Board square, 0 = a1 ... 63 = h8 (rank-major).
class Square {
public:
    constexpr Square() = default;
    constexpr explicit Square(int index) : index_(static_cast<std::uint8_t>(index)) {}
    constexpr Square(int file, int rank) : index_(static_cast<std::uint8_t>(rank * 8 + file)) {}

    constexpr int index() const noexcept { return index_; }
    constexpr int file() const noexcept { return index_ & 7; }
    constexpr int rank() const noexcept { return index_ >> 3; }

    std::string name() const;
    static std::optional<Square> parse(std::string_view text) noexcept;

    friend constexpr bool operator==(Square, Square) = default;
    friend constexpr auto operator<=>(Square, Square) = default;

private:
    std::uint8_t index_ = 0;
};

constexpr bool on_board(int file, int rank) noexcept {
    return file >= 0 && file < 8 && rank >= 0 && rank < 8;
}

class ChessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IllegalMoveError : public ChessError {
public:
    using ChessError::ChessError;
};

}  // namespace llmchess::chess
