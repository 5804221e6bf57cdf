#include "llmchess/engine/material.hpp"

#include <algorithm>
#include <cstdlib>

#include "llmchess/chess/movegen.hpp"

namespace llmchess::engine {

namespace {

int piece_value(chess::PieceType t) noexcept {
    switch (t) {
        case chess::PieceType::Pawn: return 100;
        case chess::PieceType::Knight: return 300;
        case chess::PieceType::Bishop: return 300;
        case chess::PieceType::Rook: return 500;
        case chess::PieceType::Queen: return 900;
        default: return 0;
    }
}

int centrality_ring(chess::Square s) noexcept {
    return std::max(std::abs(2 * s.file() - 7), std::abs(2 * s.rank() - 7));
}

}  // namespace

int material_balance(const chess::Board& board, chess::Color pov) noexcept {
    int score = 0;
    for (int i = 0; i < 64; ++i) {
        const chess::Piece p = board.at(chess::Square(i));
        if (p.empty()) continue;
        score += p.color == pov ? piece_value(p.type) : -piece_value(p.type);
    }
    return score;
}

std::vector<RankedMove> MaterialEngine::rank_all(const chess::Board& board) {
    struct Scored {
        chess::Move move;
        bool mate;
        int cp;
        int ring;
        std::string uci;
    };
    std::vector<Scored> scored;
    for (const chess::Move& m : chess::legal_moves(board)) {
        const chess::Board next = chess::apply_unchecked(board, m);
        const bool mate = chess::in_check(next) && chess::legal_moves(next).empty();
        scored.push_back({m, mate, material_balance(next, board.side_to_move()), centrality_ring(m.to), m.uci()});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.mate != b.mate) return a.mate;
        if (a.cp != b.cp) return a.cp > b.cp;
        if (a.ring != b.ring) return a.ring < b.ring;
        return a.uci < b.uci;
    });
    std::vector<RankedMove> out;
    out.reserve(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const Scored& s = scored[i];
        out.push_back({s.move, static_cast<int>(i + 1), s.mate ? EvalScore::mate(1) : EvalScore::cp(s.cp)});
    }
    return out;
}

std::vector<RankedMove> MaterialEngine::top_moves(const chess::Board& board, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto all = rank_all(board);
    if (all.size() > static_cast<std::size_t>(k)) all.resize(k);
    return all;
}

}  // namespace llmchess::engine
