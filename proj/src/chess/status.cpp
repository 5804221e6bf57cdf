#include "llmchess/chess/status.hpp"

#include "llmchess/chess/movegen.hpp"

namespace llmchess::chess {

std::string_view status_name(GameStatus s) noexcept {
    switch (s) {
        case GameStatus::Ongoing: return "ongoing";
        case GameStatus::Checkmate: return "checkmate";
        case GameStatus::Stalemate: return "stalemate";
        case GameStatus::DrawFiftyMove: return "draw-fifty-move";
        case GameStatus::DrawThreefold: return "draw-threefold";
        case GameStatus::DrawInsufficientMaterial: return "draw-insufficient-material";
    }
    return "ongoing";
}

bool insufficient_material(const Board& board) noexcept {
    int minors[2] = {0, 0};
    int bishop_colors[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < 64; ++i) {
        const Piece p = board.at(Square(i));
        const int side = p.color == Color::White ? 0 : 1;
        switch (p.type) {
            case PieceType::None:
            case PieceType::King: break;
            case PieceType::Pawn:
            case PieceType::Rook:
            case PieceType::Queen: return false;
            case PieceType::Knight: ++minors[side]; break;
            case PieceType::Bishop: {
                ++minors[side];
                const Square s(i);
                ++bishop_colors[side][(s.file() + s.rank()) & 1];
                break;
            }
        }
    }
    const int total = minors[0] + minors[1];
    if (total <= 1) return true;
    // K+B vs K+B with both bishops on the same square colour.
    if (minors[0] == 1 && minors[1] == 1) {
        for (int c = 0; c < 2; ++c)
            if (bishop_colors[0][c] == 1 && bishop_colors[1][c] == 1) return true;
    }
    return false;
}

GameStatus game_status(const Board& board, std::span<const Board> history) {
    if (legal_moves(board).empty())
        return in_check(board) ? GameStatus::Checkmate : GameStatus::Stalemate;
    if (insufficient_material(board)) return GameStatus::DrawInsufficientMaterial;

    const PositionKey key = position_key(board);
    int occurrences = 0;
    for (const Board& past : history) {
        if (past.side_to_move() == board.side_to_move() && position_key(past) == key) ++occurrences;
    }
    if (history.empty() || !(history.back() == board)) ++occurrences;
    if (occurrences >= 3) return GameStatus::DrawThreefold;

    if (board.halfmove_clock() >= 100) return GameStatus::DrawFiftyMove;
    return GameStatus::Ongoing;
}

}  // namespace llmchess::chess
