#include <doctest.h>

#include <random>
#include <vector>

#include "llmchess/chess/board.hpp"
#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"
#include "llmchess/chess/status.hpp"
#include "test_support.hpp"

using namespace llmchess::chess;

namespace {

// Check detection written independently of movegen: scan every enemy piece and
// walk its movement pattern by hand.
bool oracle_king_attacked(const Board& b, Color victim) {
    auto king = b.king_square(victim);
    REQUIRE(king.has_value());
    const int kf = king->file(), kr = king->rank();
    for (int i = 0; i < 64; ++i) {
        const Piece p = b.at(Square(i));
        if (p.empty() || p.color == victim) continue;
        const int f = Square(i).file(), r = Square(i).rank();
        const int df = kf - f, dr = kr - r;
        const int adf = df < 0 ? -df : df, adr = dr < 0 ? -dr : dr;
        auto clear_line = [&] {
            const int sf = (df > 0) - (df < 0), sr = (dr > 0) - (dr < 0);
            for (int ff = f + sf, rr = r + sr; ff != kf || rr != kr; ff += sf, rr += sr)
                if (!b.at(Square(ff, rr)).empty()) return false;
            return true;
        };
        switch (p.type) {
            case PieceType::Pawn:
                if (adf == 1 && dr == (p.color == Color::White ? 1 : -1)) return true;
                break;
            case PieceType::Knight:
                if ((adf == 1 && adr == 2) || (adf == 2 && adr == 1)) return true;
                break;
            case PieceType::King:
                if (adf <= 1 && adr <= 1) return true;
                break;
            case PieceType::Bishop:
                if (adf == adr && clear_line()) return true;
                break;
            case PieceType::Rook:
                if ((df == 0 || dr == 0) && clear_line()) return true;
                break;
            case PieceType::Queen:
                if ((adf == adr || df == 0 || dr == 0) && clear_line()) return true;
                break;
            default: break;
        }
    }
    return false;
}

std::string fen_without_clocks(const Board& b) {
    const std::string fen = b.fen();
    return fen.substr(0, fen.rfind(' ', fen.rfind(' ') - 1));
}

}  // namespace

TEST_CASE("initial position") {
    const Board b = Board::initial();
    CHECK(b.side_to_move() == Color::White);
    CHECK(b.piece_count() == 32);
    CHECK(b.halfmove_clock() == 0);
    CHECK(b.fullmove_number() == 1);
    CHECK(b.castling() == CastlingRights{true, true, true, true});
    CHECK(legal_moves(b).size() == 20);
    CHECK(b.fen() == "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

TEST_CASE("perft matches python-chess reference counts") {
    // Frozen from tests/oracle/perft_oracle.py.
    const Board start = Board::initial();
    CHECK(perft(start, 1) == 20);
    CHECK(perft(start, 2) == 400);
    CHECK(perft(start, 3) == 8902);
    CHECK(perft(start, 4) == 197281);

    const Board kiwipete = Board::from_fen("r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1");
    CHECK(perft(kiwipete, 1) == 48);
    CHECK(perft(kiwipete, 2) == 2039);
    CHECK(perft(kiwipete, 3) == 97862);

    const Board pos3 = Board::from_fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1");
    CHECK(perft(pos3, 4) == 43238);
    const Board pos4 = Board::from_fen("r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1");
    CHECK(perft(pos4, 3) == 9467);
    const Board pos5 = Board::from_fen("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8");
    CHECK(perft(pos5, 3) == 62379);
}

TEST_CASE("apply_move updates en passant, clocks and castling rights") {
    const Board start = Board::initial();
    const Board after = apply_move(start, parse_san(start, "e4"));
    REQUIRE(after.en_passant().has_value());
    CHECK(after.en_passant()->name() == "e3");
    CHECK(after.side_to_move() == Color::Black);
    CHECK(start == Board::initial());  // pure

    const Board b = Board::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 3 10");
    for (const Move& m : legal_moves(b)) {
        if (m.moved != PieceType::King) continue;
        const Board next = apply_unchecked(b, m);
        CHECK_FALSE(next.castling().white_kingside);
        CHECK_FALSE(next.castling().white_queenside);
        CHECK(next.castling().black_kingside);
        CHECK(next.halfmove_clock() == 4);
    }

    Move bogus = legal_moves(start).front();
    bogus.to = Square(4, 4);
    CHECK_THROWS_AS(apply_move(start, bogus), IllegalMoveError);
}

TEST_CASE("en passant capture removes the passed pawn") {
    const Board b = Board::from_fen("4k3/8/8/3pP3/8/8/8/4K3 w - d6 0 2");
    const Move m = parse_san(b, "exd6");
    CHECK(m.en_passant);
    const Board next = apply_move(b, m);
    CHECK(next.at(*Square::parse("d5")).empty());
    CHECK(next.at(*Square::parse("d6")) == Piece{PieceType::Pawn, Color::White});
}

TEST_CASE("castling is not allowed through check") {
    bool kingside = false, queenside = false;
    for (const Move& m : legal_moves(Board::from_fen("4kr2/8/8/8/8/8/8/R3K2R w KQ - 0 1"))) {
        kingside |= m.castle == CastleSide::Kingside;
        queenside |= m.castle == CastleSide::Queenside;
    }
    CHECK_FALSE(kingside);
    CHECK(queenside);
}

TEST_CASE("FEN rejects invalid positions") {
    CHECK_THROWS_AS(Board::from_fen("8/8/8/8/8/8/8/8 w - - 0 1"), FenError);
    CHECK_THROWS_AS(Board::from_fen("4k3/8/8/8/8/8/8/P3K3 w - - 0 1"), FenError);
    CHECK_THROWS_AS(Board::from_fen("4k3/8/8/8/8/8/8/4K2r b - - 0 1"), FenError);
    CHECK_THROWS_AS(Board::from_fen("4k3/8/8/8/8/8/8/4K3 w - e3 0 1"), FenError);
    CHECK_THROWS_AS(Board::from_fen("garbage"), FenError);
    CHECK_NOTHROW(Board::from_fen("4k3/8/8/8/8/8/8/4K3 w - -"));
}

TEST_CASE("game status examples") {
    // Fool's mate.
    Board b = Board::initial();
    std::vector<Board> history{b};
    for (const char* san : {"f3", "e5", "g4", "Qh4#"}) {
        b = apply_move(b, parse_san(b, san));
        history.push_back(b);
    }
    CHECK(game_status(b, history) == GameStatus::Checkmate);
    CHECK(legal_moves(b).empty());

    CHECK(game_status(Board::from_fen("4k3/8/8/8/8/8/8/4K3 w - - 0 1"), {}) == GameStatus::DrawInsufficientMaterial);
    CHECK(game_status(Board::from_fen("4k3/8/8/8/8/8/8/4KB2 w - - 0 1"), {}) == GameStatus::DrawInsufficientMaterial);
    CHECK(game_status(Board::from_fen("4k3/8/8/8/8/8/8/3BKB2 w - - 0 1"), {}) == GameStatus::Ongoing);
    CHECK(game_status(Board::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1"), {}) == GameStatus::Stalemate);
    CHECK(game_status(Board::from_fen("4k3/8/8/8/8/8/8/R3K3 w - - 100 80"), {}) == GameStatus::DrawFiftyMove);
}

TEST_CASE("threefold repetition by a shuffling rook triangle") {
    Board b = Board::from_fen("4k3/8/8/8/8/8/8/R3K3 w - - 0 1");
    std::vector<Board> history{b};
    const char* white[] = {"Ra2", "Ra3", "Ra1"};
    const char* black[] = {"Kd8", "Ke8"};
    GameStatus status = GameStatus::Ongoing;
    int ply = 0;
    while (!is_terminal(status) && ply < 60) {
        const char* san = b.side_to_move() == Color::White ? white[(ply / 2) % 3] : black[(ply / 2) % 2];
        b = apply_move(b, parse_san(b, san));
        history.push_back(b);
        ++ply;
        status = game_status(b, history);
    }
    CHECK(status == GameStatus::DrawThreefold);

    // Oracle: the first prefix of the history in which some position occurs three times.
    int first_triple = -1;
    for (std::size_t end = 1; end <= history.size() && first_triple < 0; ++end) {
        for (std::size_t i = 0; i < end; ++i) {
            int n = 0;
            for (std::size_t j = 0; j < end; ++j) n += fen_without_clocks(history[i]) == fen_without_clocks(history[j]);
            if (n >= 3) {
                first_triple = static_cast<int>(end) - 1;
                break;
            }
        }
    }
    CHECK(first_triple == ply);
}

TEST_CASE("property: random playouts keep invariants and never leave the king in check") {
    std::mt19937_64 rng(7);
    int positions = 0;
    for (int game = 0; game < 60; ++game) {
        Board b = Board::initial();
        for (int ply = 0; ply < 150; ++ply) {
            const auto moves = legal_moves(b);
            if (moves.empty()) break;
            for (const Move& m : moves) {
                const Board next = apply_unchecked(b, m);
                CHECK_FALSE(oracle_king_attacked(next, b.side_to_move()));
                CHECK(next.invariant_violations().empty());
            }
            b = apply_unchecked(b, moves[rng() % moves.size()]);
            CHECK(Board::from_fen(b.fen()) == b);
            ++positions;
        }
    }
    CHECK(positions > 1000);
}

TEST_CASE("python-chess legal move sets agree on random positions") {
    for (const auto& row : llmchess::test::load_jsonl(LLMCHESS_FIXTURE_DIR "/san_oracle.jsonl")) {
        const Board b = Board::from_fen(row.at("fen").get<std::string>());
        const auto moves = legal_moves(b);
        CHECK(moves.size() == row.at("uci_to_san").size());
        for (const Move& m : moves) CHECK(row.at("uci_to_san").contains(m.uci()));
    }
}
