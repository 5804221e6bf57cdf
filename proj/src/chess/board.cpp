#include "llmchess/chess/board.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"

namespace llmchess::chess {

namespace {

char fen_char(Piece p) {
    char c = p.type == PieceType::Pawn ? 'P' : piece_letter(p.type);
    return p.color == Color::White ? c : static_cast<char>(c - 'A' + 'a');
}

std::vector<std::string_view> split_fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

int parse_int(std::string_view text, const char* what) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0)
        throw FenError(fmt::format("bad {} field '{}'", what, text));
    return value;
}

}  // namespace

Board Board::initial() {
    return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

Board Board::from_fen(std::string_view fen) {
    const auto fields = split_fields(fen);
    if (fields.size() != 4 && fields.size() != 6)
        throw FenError(fmt::format("expected 6 FEN fields, got {}", fields.size()));

    Board b;
    int rank = 7;
    int file = 0;
    for (char c : fields[0]) {
        if (c == '/') {
            if (file != 8) throw FenError("rank does not describe 8 files");
            --rank;
            file = 0;
            if (rank < 0) throw FenError("too many ranks");
        } else if (c >= '1' && c <= '8') {
            file += c - '0';
            if (file > 8) throw FenError("rank overflows 8 files");
        } else {
            const bool white = c >= 'A' && c <= 'Z';
            const char upper = white ? c : static_cast<char>(c - 'a' + 'A');
            auto type = piece_from_letter(upper);
            if (!type || file > 7) throw FenError(fmt::format("bad placement character '{}'", c));
            b.set(Square(file, rank), Piece{*type, white ? Color::White : Color::Black});
            ++file;
        }
    }
    if (rank != 0 || file != 8) throw FenError("placement does not cover 64 squares");

    if (fields[1] == "w")
        b.side_ = Color::White;
    else if (fields[1] == "b")
        b.side_ = Color::Black;
    else
        throw FenError(fmt::format("bad side to move '{}'", fields[1]));

    if (fields[2] != "-") {
        for (char c : fields[2]) {
            switch (c) {
                case 'K': b.castling_.white_kingside = true; break;
                case 'Q': b.castling_.white_queenside = true; break;
                case 'k': b.castling_.black_kingside = true; break;
                case 'q': b.castling_.black_queenside = true; break;
                default: throw FenError(fmt::format("bad castling field '{}'", fields[2]));
            }
        }
    }

    if (fields[3] != "-") {
        auto sq = Square::parse(fields[3]);
        if (!sq) throw FenError(fmt::format("bad en-passant field '{}'", fields[3]));
        b.ep_ = sq;
    }

    if (fields.size() == 6) {
        b.halfmove_ = parse_int(fields[4], "halfmove");
        b.fullmove_ = parse_int(fields[5], "fullmove");
        if (b.fullmove_ < 1) throw FenError("fullmove number must be >= 1");
    }

    // Castling rights that contradict placement are dropped rather than rejected.
    auto has = [&](int f, int r, PieceType t, Color c) { return b.at(Square(f, r)) == Piece{t, c}; };
    if (!has(4, 0, PieceType::King, Color::White)) b.castling_.white_kingside = b.castling_.white_queenside = false;
    if (!has(4, 7, PieceType::King, Color::Black)) b.castling_.black_kingside = b.castling_.black_queenside = false;
    if (!has(7, 0, PieceType::Rook, Color::White)) b.castling_.white_kingside = false;
    if (!has(0, 0, PieceType::Rook, Color::White)) b.castling_.white_queenside = false;
    if (!has(7, 7, PieceType::Rook, Color::Black)) b.castling_.black_kingside = false;
    if (!has(0, 7, PieceType::Rook, Color::Black)) b.castling_.black_queenside = false;

    if (auto problems = b.invariant_violations(); !problems.empty())
        throw FenError(fmt::format("invalid position: {}", problems.front()));
    return b;
}

std::string Board::fen() const {
    std::string out;
    for (int r = 7; r >= 0; --r) {
        int empty = 0;
        for (int f = 0; f < 8; ++f) {
            Piece p = at(Square(f, r));
            if (p.empty()) {
                ++empty;
                continue;
            }
            if (empty) out += static_cast<char>('0' + empty);
            empty = 0;
            out += fen_char(p);
        }
        if (empty) out += static_cast<char>('0' + empty);
        if (r) out += '/';
    }
    out += side_ == Color::White ? " w " : " b ";
    std::string rights;
    if (castling_.white_kingside) rights += 'K';
    if (castling_.white_queenside) rights += 'Q';
    if (castling_.black_kingside) rights += 'k';
    if (castling_.black_queenside) rights += 'q';
    out += rights.empty() ? "-" : rights;
    out += ' ';
    out += ep_ ? ep_->name() : "-";
    out += fmt::format(" {} {}", halfmove_, fullmove_);
    return out;
}

std::optional<Square> Board::king_square(Color c) const noexcept {
    for (int i = 0; i < 64; ++i)
        if (squares_[i] == Piece{PieceType::King, c}) return Square(i);
    return std::nullopt;
}

int Board::count(Color c, PieceType t) const noexcept {
    int n = 0;
    for (const Piece& p : squares_) n += (p == Piece{t, c});
    return n;
}

int Board::piece_count() const noexcept {
    int n = 0;
    for (const Piece& p : squares_) n += !p.empty();
    return n;
}

std::vector<std::string> Board::invariant_violations() const {
    std::vector<std::string> out;
    for (Color c : {Color::White, Color::Black}) {
        if (count(c, PieceType::King) != 1)
            out.push_back(fmt::format("{} must have exactly one king", color_name(c)));
    }
    for (int f = 0; f < 8; ++f) {
        for (int r : {0, 7}) {
            if (at(Square(f, r)).type == PieceType::Pawn)
                out.push_back(fmt::format("pawn on back rank {}", Square(f, r).name()));
        }
    }
    if (ep_) {
        // White just double-pushed => black to move, target on rank 3.
        const Color pusher = opposite(side_);
        const int target_rank = pusher == Color::White ? 2 : 5;
        const int dir = pusher == Color::White ? 1 : -1;
        const int f = ep_->file();
        bool ok = ep_->rank() == target_rank && at(*ep_).empty() &&
                  at(Square(f, target_rank - dir)).empty() &&
                  at(Square(f, target_rank + dir)) == Piece{PieceType::Pawn, pusher};
        if (!ok) out.push_back(fmt::format("inconsistent en-passant target {}", ep_->name()));
    }
    if (out.empty() && in_check(*this, opposite(side_)))
        out.push_back("side not to move is in check");
    return out;
}

PositionKey position_key(const Board& board) {
    PositionKey key;
    for (int i = 0; i < 64; ++i) key.squares[i] = board.at(Square(i));
    key.side = board.side_to_move();
    key.castling = board.castling();
    if (auto ep = board.en_passant()) {
        for (const Move& m : legal_moves(board)) {
            if (m.en_passant) {
                key.ep = ep;
                break;
            }
        }
    }
    return key;
}

}  // namespace llmchess::chess
