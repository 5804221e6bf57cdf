#include "llmchess/chess/types.hpp"
#include "llmchess/chess/move.hpp"

namespace llmchess::chess {

std::string_view color_name(Color c) noexcept { return c == Color::White ? "white" : "black"; }

char piece_letter(PieceType t) noexcept {
    switch (t) {
        case PieceType::Knight: return 'N';
        case PieceType::Bishop: return 'B';
        case PieceType::Rook: return 'R';
        case PieceType::Queen: return 'Q';
        case PieceType::King: return 'K';
        default: return '\0';
    }
}

std::optional<PieceType> piece_from_letter(char upper) noexcept {
    switch (upper) {
        case 'P': return PieceType::Pawn;
        case 'N': return PieceType::Knight;
        case 'B': return PieceType::Bishop;
        case 'R': return PieceType::Rook;
        case 'Q': return PieceType::Queen;
        case 'K': return PieceType::King;
        default: return std::nullopt;
    }
}

std::string_view piece_name(PieceType t) noexcept {
    switch (t) {
        case PieceType::Pawn: return "pawn";
        case PieceType::Knight: return "knight";
        case PieceType::Bishop: return "bishop";
        case PieceType::Rook: return "rook";
        case PieceType::Queen: return "queen";
        case PieceType::King: return "king";
        default: return "none";
    }
}

std::string Square::name() const {
    return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::optional<Square> Square::parse(std::string_view text) noexcept {
    if (text.size() != 2) return std::nullopt;
    const int f = text[0] - 'a';
    const int r = text[1] - '1';
    if (!on_board(f, r)) return std::nullopt;
    return Square(f, r);
}

std::string Move::uci() const {
    std::string out = from.name() + to.name();
    if (promotion != PieceType::None)
        out += static_cast<char>(piece_letter(promotion) - 'A' + 'a');
    return out;
}

}  // namespace llmchess::chess
