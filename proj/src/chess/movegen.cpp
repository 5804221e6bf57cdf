#include "llmchess/chess/movegen.hpp"

#include <array>

namespace llmchess::chess {

namespace {

struct Step {
    int df;
    int dr;
};

constexpr std::array<Step, 8> kKnightSteps{{{1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
constexpr std::array<Step, 8> kKingSteps{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr std::array<Step, 4> kRookDirs{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
constexpr std::array<Step, 4> kBishopDirs{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

constexpr PieceType kPromotions[] = {PieceType::Queen, PieceType::Rook, PieceType::Bishop, PieceType::Knight};

int pawn_dir(Color c) { return c == Color::White ? 1 : -1; }

template <typename Fn>
void for_each_attack(const Board& board, Square from, Fn&& fn) {
    const Piece p = board.at(from);
    const int f = from.file();
    const int r = from.rank();
    auto leaper = [&](const auto& steps) {
        for (Step s : steps)
            if (on_board(f + s.df, r + s.dr)) fn(Square(f + s.df, r + s.dr));
    };
    auto slider = [&](const auto& dirs) {
        for (Step d : dirs) {
            int ff = f + d.df;
            int rr = r + d.dr;
            while (on_board(ff, rr)) {
                fn(Square(ff, rr));
                if (!board.at(Square(ff, rr)).empty()) break;
                ff += d.df;
                rr += d.dr;
            }
        }
    };
    switch (p.type) {
        case PieceType::Pawn: {
            const int rr = r + pawn_dir(p.color);
            for (int df : {-1, 1})
                if (on_board(f + df, rr)) fn(Square(f + df, rr));
            break;
        }
        case PieceType::Knight: leaper(kKnightSteps); break;
        case PieceType::King: leaper(kKingSteps); break;
        case PieceType::Bishop: slider(kBishopDirs); break;
        case PieceType::Rook: slider(kRookDirs); break;
        case PieceType::Queen:
            slider(kBishopDirs);
            slider(kRookDirs);
            break;
        case PieceType::None: break;
    }
}

bool ray_hits(const Board& board, Square target, Color by, Step d, PieceType a, PieceType b) {
    int f = target.file() + d.df;
    int r = target.rank() + d.dr;
    while (on_board(f, r)) {
        const Piece p = board.at(Square(f, r));
        if (!p.empty()) return p.color == by && (p.type == a || p.type == b);
        f += d.df;
        r += d.dr;
    }
    return false;
}

void push_pawn_moves(const Board& board, Square from, std::vector<Move>& out) {
    const Color us = board.side_to_move();
    const int dir = pawn_dir(us);
    const int f = from.file();
    const int r = from.rank();
    const int last = us == Color::White ? 7 : 0;
    const int start = us == Color::White ? 1 : 6;

    auto add = [&](Square to, bool capture, bool ep, bool dbl) {
        if (to.rank() == last) {
            for (PieceType promo : kPromotions)
                out.push_back(Move{from, to, promo, PieceType::Pawn, capture, false, false, CastleSide::None});
        } else {
            out.push_back(Move{from, to, PieceType::None, PieceType::Pawn, capture, ep, dbl, CastleSide::None});
        }
    };

    if (on_board(f, r + dir) && board.at(Square(f, r + dir)).empty()) {
        add(Square(f, r + dir), false, false, false);
        if (r == start && board.at(Square(f, r + 2 * dir)).empty())
            add(Square(f, r + 2 * dir), false, false, true);
    }
    for (int df : {-1, 1}) {
        if (!on_board(f + df, r + dir)) continue;
        const Square to(f + df, r + dir);
        const Piece target = board.at(to);
        if (!target.empty() && target.color != us)
            add(to, true, false, false);
        else if (board.en_passant() && *board.en_passant() == to)
            add(to, true, true, false);
    }
}

void push_castles(const Board& board, std::vector<Move>& out) {
    const Color us = board.side_to_move();
    const Color them = opposite(us);
    const int r = us == Color::White ? 0 : 7;
    const Square king(4, r);
    if (board.at(king) != Piece{PieceType::King, us}) return;
    if (is_attacked(board, king, them)) return;
    const auto& rights = board.castling();
    if (rights.kingside(us) && board.at(Square(5, r)).empty() && board.at(Square(6, r)).empty() &&
        board.at(Square(7, r)) == Piece{PieceType::Rook, us} && !is_attacked(board, Square(5, r), them) &&
        !is_attacked(board, Square(6, r), them)) {
        out.push_back(Move{king, Square(6, r), PieceType::None, PieceType::King, false, false, false, CastleSide::Kingside});
    }
    if (rights.queenside(us) && board.at(Square(3, r)).empty() && board.at(Square(2, r)).empty() &&
        board.at(Square(1, r)).empty() && board.at(Square(0, r)) == Piece{PieceType::Rook, us} &&
        !is_attacked(board, Square(3, r), them) && !is_attacked(board, Square(2, r), them)) {
        out.push_back(Move{king, Square(2, r), PieceType::None, PieceType::King, false, false, false, CastleSide::Queenside});
    }
}

std::vector<Move> pseudo_legal_moves(const Board& board) {
    std::vector<Move> out;
    out.reserve(48);
    const Color us = board.side_to_move();
    for (int i = 0; i < 64; ++i) {
        const Square from(i);
        const Piece p = board.at(from);
        if (p.empty() || p.color != us) continue;
        if (p.type == PieceType::Pawn) {
            push_pawn_moves(board, from, out);
            continue;
        }
        for_each_attack(board, from, [&](Square to) {
            const Piece target = board.at(to);
            if (!target.empty() && target.color == us) return;
            out.push_back(Move{from, to, PieceType::None, p.type, !target.empty(), false, false, CastleSide::None});
        });
    }
    push_castles(board, out);
    return out;
}

void clear_rights_for(CastlingRights& rights, Square s) {
    switch (s.index()) {
        case 0: rights.white_queenside = false; break;
        case 7: rights.white_kingside = false; break;
        case 4: rights.white_kingside = rights.white_queenside = false; break;
        case 56: rights.black_queenside = false; break;
        case 63: rights.black_kingside = false; break;
        case 60: rights.black_kingside = rights.black_queenside = false; break;
        default: break;
    }
}

}  // namespace

bool is_attacked(const Board& board, Square target, Color by) noexcept {
    const int f = target.file();
    const int r = target.rank();
    // Pawns of `by` attack from one rank behind (relative to their direction).
    const int pr = r - pawn_dir(by);
    for (int df : {-1, 1})
        if (on_board(f + df, pr) && board.at(Square(f + df, pr)) == Piece{PieceType::Pawn, by}) return true;
    for (Step s : kKnightSteps)
        if (on_board(f + s.df, r + s.dr) && board.at(Square(f + s.df, r + s.dr)) == Piece{PieceType::Knight, by})
            return true;
    for (Step s : kKingSteps)
        if (on_board(f + s.df, r + s.dr) && board.at(Square(f + s.df, r + s.dr)) == Piece{PieceType::King, by})
            return true;
    for (Step d : kRookDirs)
        if (ray_hits(board, target, by, d, PieceType::Rook, PieceType::Queen)) return true;
    for (Step d : kBishopDirs)
        if (ray_hits(board, target, by, d, PieceType::Bishop, PieceType::Queen)) return true;
    return false;
}

std::vector<Square> attackers_of(const Board& board, Square target, Color by) {
    std::vector<Square> out;
    for (int i = 0; i < 64; ++i) {
        const Piece p = board.at(Square(i));
        if (p.empty() || p.color != by) continue;
        bool hit = false;
        for_each_attack(board, Square(i), [&](Square s) { hit = hit || s == target; });
        if (hit) out.push_back(Square(i));
    }
    return out;
}

std::vector<Square> attacked_by_piece(const Board& board, Square from) {
    std::vector<Square> out;
    for_each_attack(board, from, [&](Square s) { out.push_back(s); });
    return out;
}

bool in_check(const Board& board, Color c) noexcept {
    auto king = board.king_square(c);
    return king && is_attacked(board, *king, opposite(c));
}

Board apply_unchecked(const Board& board, const Move& m) noexcept {
    Board next = board;
    const Color us = board.side_to_move();
    const Piece moving = board.at(m.from);

    next.clear(m.from);
    if (m.en_passant) next.clear(Square(m.to.file(), m.from.rank()));
    next.set(m.to, m.promotion != PieceType::None ? Piece{m.promotion, us} : moving);

    if (m.castle != CastleSide::None) {
        const int r = m.from.rank();
        const Square rook_from = m.castle == CastleSide::Kingside ? Square(7, r) : Square(0, r);
        const Square rook_to = m.castle == CastleSide::Kingside ? Square(5, r) : Square(3, r);
        next.clear(rook_from);
        next.set(rook_to, Piece{PieceType::Rook, us});
    }

    CastlingRights rights = board.castling();
    clear_rights_for(rights, m.from);
    clear_rights_for(rights, m.to);
    next.set_castling(rights);

    next.set_en_passant(m.double_push ? std::optional<Square>(Square(m.from.file(), (m.from.rank() + m.to.rank()) / 2))
                                      : std::nullopt);

    const bool reset = moving.type == PieceType::Pawn || m.capture;
    next.set_clocks(reset ? 0 : board.halfmove_clock() + 1,
                    board.fullmove_number() + (us == Color::Black ? 1 : 0));
    next.set_side_to_move(opposite(us));
    return next;
}

std::vector<Move> legal_moves(const Board& board) {
    std::vector<Move> out;
    const Color us = board.side_to_move();
    for (const Move& m : pseudo_legal_moves(board)) {
        if (!in_check(apply_unchecked(board, m), us)) out.push_back(m);
    }
    return out;
}

Board apply_move(const Board& board, const Move& move) {
    for (const Move& m : legal_moves(board))
        if (m == move) return apply_unchecked(board, m);
    throw IllegalMoveError("illegal move " + move.uci() + " in " + board.fen());
}

std::optional<Move> find_uci_move(const Board& board, std::string_view uci) {
    for (const Move& m : legal_moves(board))
        if (m.uci() == uci) return m;
    return std::nullopt;
}

std::uint64_t perft(const Board& board, int depth) {
    if (depth <= 0) return 1;
    const auto moves = legal_moves(board);
    if (depth == 1) return moves.size();
    std::uint64_t total = 0;
    for (const Move& m : moves) total += perft(apply_unchecked(board, m), depth - 1);
    return total;
}

}  // namespace llmchess::chess
