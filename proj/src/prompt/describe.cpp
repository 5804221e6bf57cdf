#include "llmchess/prompt/describe.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"
#include "llmchess/prompt/variation.hpp"

namespace llmchess::prompt {

using chess::Board;
using chess::Color;
using chess::Piece;
using chess::PieceType;
using chess::Square;

std::string_view relation_mode_name(RelationMode m) noexcept { return m == RelationMode::Pseudo ? "pseudo" : "pin-aware"; }

RelationMode relation_mode_from_name(std::string_view name) {
    if (name == "pseudo") return RelationMode::Pseudo;
    if (name == "pin-aware") return RelationMode::PinAware;
    throw VariationError(fmt::format("unknown relation mode '{}'", name));
}

namespace {

// Would the piece on `from` legally move onto `to` if its side were to move
// and `to` held an enemy piece?
bool capture_is_legal(const Board& board, Square from, Square to) {
    Board b = board;
    const Color side = board.at(from).color;
    b.set_side_to_move(side);
    b.set_en_passant(std::nullopt);
    const Piece occupant = b.at(to);
    if (occupant.color == side) b.set(to, Piece{occupant.type, chess::opposite(side)});
    for (const chess::Move& m : chess::legal_moves(b))
        if (m.from == from && m.to == to) return true;
    return false;
}

std::vector<Square> filter(const Board& board, std::vector<Square> from_squares, Square to, RelationMode mode) {
    if (mode == RelationMode::PinAware)
        std::erase_if(from_squares, [&](Square s) { return !capture_is_legal(board, s, to); });
    std::sort(from_squares.begin(), from_squares.end());
    return from_squares;
}

SideDescription describe_side(const Board& board, Color color, RelationMode mode) {
    SideDescription side;
    side.color = color;
    const Color enemy = chess::opposite(color);
    const auto ep = board.en_passant();
    for (int i = 0; i < 64; ++i) {
        const Square sq(i);
        const Piece p = board.at(sq);
        if (p.empty() || p.color != color) continue;
        ++side.counts[static_cast<std::size_t>(p.type)];

        PieceRelations rel;
        rel.piece = p;
        rel.square = sq;
        for (Square t : chess::attacked_by_piece(board, sq)) {
            const Piece victim = board.at(t);
            if (victim.empty() || victim.color != enemy) continue;
            if (mode == RelationMode::PinAware && !capture_is_legal(board, sq, t)) continue;
            rel.targets.push_back(t);
        }
        std::sort(rel.targets.begin(), rel.targets.end());
        rel.attackers = filter(board, chess::attackers_of(board, sq, enemy), sq, mode);
        rel.defenders = filter(board, chess::attackers_of(board, sq, color), sq, mode);

        if (ep && p.type == PieceType::Pawn && sq.file() == ep->file() &&
            ep->rank() == (color == Color::White ? 2 : 5) && sq.rank() == (color == Color::White ? 3 : 4)) {
            for (Square a : chess::attackers_of(board, *ep, enemy))
                if (board.at(a).type == PieceType::Pawn) rel.en_passant_square = *ep;
        }
        side.pieces.push_back(std::move(rel));
    }
    const auto& rights = board.castling();
    side.kingside = rights.kingside(color);
    side.queenside = rights.queenside(color);
    return side;
}

std::string capitalized(std::string_view s) {
    std::string out(s);
    if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

std::string list_pieces(const Board& board, const std::vector<Square>& squares) {
    if (squares.empty()) return "nothing";
    std::vector<std::string> items;
    for (Square s : squares) items.push_back(fmt::format("the {} on {}", chess::piece_name(board.at(s).type), s.name()));
    if (items.size() == 1) return items[0];
    std::string out;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out + " and " + items.back();
}

void render_side(std::string& out, const Board& board, const SideDescription& side) {
    const std::string who = capitalized(chess::color_name(side.color));
    static constexpr PieceType kOrder[] = {PieceType::King,   PieceType::Queen,  PieceType::Rook,
                                           PieceType::Bishop, PieceType::Knight, PieceType::Pawn};
    for (PieceType t : kOrder) {
        const int n = side.counts[static_cast<std::size_t>(t)];
        out += fmt::format("{} has {} {}{} left.\n", who, n, chess::piece_name(t), n == 1 ? "" : "s");
    }
    for (const PieceRelations& r : side.pieces) {
        out += fmt::format("A {} is on {}, can capture {}, can be captured by {}, and is defended by {}.",
                           chess::piece_name(r.piece.type), r.square.name(), list_pieces(board, r.targets),
                           list_pieces(board, r.attackers), list_pieces(board, r.defenders));
        if (r.en_passant_square) out += fmt::format(" It can be captured en passant on {}.", r.en_passant_square->name());
        out += "\n";
    }
    out += fmt::format("{} {} kingside castling rights.\n", who, side.kingside ? "has" : "does not have");
    out += fmt::format("{} {} queenside castling rights.\n", who, side.queenside ? "has" : "does not have");
}

}  // namespace

BoardDescription describe(const Board& board, RelationMode mode) {
    return {describe_side(board, Color::White, mode), describe_side(board, Color::Black, mode)};
}

std::string render_description(const Board& board, const BoardDescription& d) {
    std::string out;
    render_side(out, board, d.white);
    out += "\n";
    render_side(out, board, d.black);
    if (!out.empty() && out.back() == '\n') out.pop_back();
    return out;
}

std::string describe_board(const Board& board, RelationMode mode) { return render_description(board, describe(board, mode)); }

}  // namespace llmchess::prompt
