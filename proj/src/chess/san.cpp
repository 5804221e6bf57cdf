#include "llmchess/chess/san.hpp"

#include <algorithm>
#include <cctype>

#include "llmchess/chess/movegen.hpp"

namespace llmchess::chess {

namespace {

bool is_file(char c) { return c >= 'a' && c <= 'h'; }
bool is_rank(char c) { return c >= '1' && c <= '8'; }

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string format_without_suffix(const std::vector<Move>& legal, const Move& m) {
    if (m.castle == CastleSide::Kingside) return "O-O";
    if (m.castle == CastleSide::Queenside) return "O-O-O";

    std::string out;
    if (m.moved == PieceType::Pawn) {
        if (m.capture) {
            out += static_cast<char>('a' + m.from.file());
            out += 'x';
        }
        out += m.to.name();
        if (m.promotion != PieceType::None) {
            out += '=';
            out += piece_letter(m.promotion);
        }
        return out;
    }

    out += piece_letter(m.moved);
    bool clash = false;
    bool file_clash = false;
    bool rank_clash = false;
    for (const Move& other : legal) {
        if (other.moved != m.moved || other.to != m.to || other.from == m.from) continue;
        clash = true;
        file_clash = file_clash || other.from.file() == m.from.file();
        rank_clash = rank_clash || other.from.rank() == m.from.rank();
    }
    if (clash) {
        if (!file_clash) {
            out += static_cast<char>('a' + m.from.file());
        } else if (!rank_clash) {
            out += static_cast<char>('1' + m.from.rank());
        } else {
            out += m.from.name();
        }
    }
    if (m.capture) out += 'x';
    out += m.to.name();
    return out;
}

}  // namespace

std::string_view verdict_name(SanVerdict v) noexcept {
    switch (v) {
        case SanVerdict::Legal: return "legal";
        case SanVerdict::Illegal: return "illegal";
        case SanVerdict::Ambiguous: return "ambiguous";
        case SanVerdict::NotAMove: return "not-a-move";
    }
    return "not-a-move";
}

std::optional<SanVerdict> verdict_from_name(std::string_view name) noexcept {
    for (SanVerdict v : {SanVerdict::Legal, SanVerdict::Illegal, SanVerdict::Ambiguous, SanVerdict::NotAMove})
        if (verdict_name(v) == name) return v;
    return std::nullopt;
}

std::string normalize_san(std::string_view text) {
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    bool changed = true;
    while (changed && !text.empty()) {
        changed = false;
        while (!text.empty() && is_space(text.back())) {
            text.remove_suffix(1);
            changed = true;
        }
        if (ends_with(text, "e.p.")) {
            text.remove_suffix(4);
            changed = true;
            continue;
        }
        if (!text.empty() && std::string_view("+#!?.,;:").find(text.back()) != std::string_view::npos) {
            text.remove_suffix(1);
            changed = true;
        }
    }
    return std::string(text);
}

std::optional<SanShape> parse_san_shape(std::string_view s) {
    SanShape shape;
    if (s == "O-O" || s == "0-0") {
        shape.castle = true;
        shape.castle_side = CastleSide::Kingside;
        shape.piece = PieceType::King;
        return shape;
    }
    if (s == "O-O-O" || s == "0-0-0") {
        shape.castle = true;
        shape.castle_side = CastleSide::Queenside;
        shape.piece = PieceType::King;
        return shape;
    }
    if (s.empty()) return std::nullopt;

    std::size_t i = 0;
    if (s[0] != 'P') {
        if (auto p = piece_from_letter(s[0])) {
            shape.piece = *p;
            i = 1;
        }
    }

    // Promotion suffix: "=Q" or a bare "Q" right after the destination rank.
    if (s.size() >= 2 && piece_from_letter(s.back()) && s.back() != 'K' && s.back() != 'P') {
        const char before = s[s.size() - 2];
        if (before == '=' || is_rank(before)) {
            if (shape.piece != PieceType::Pawn) return std::nullopt;
            shape.promotion = *piece_from_letter(s.back());
            s.remove_suffix(before == '=' ? 2 : 1);
        }
    }

    std::string_view body = s.substr(i);
    if (body.size() < 2 || !is_file(body[body.size() - 2]) || !is_rank(body.back())) return std::nullopt;
    shape.to = Square(body[body.size() - 2] - 'a', body.back() - '1');
    body.remove_suffix(2);

    std::size_t j = 0;
    if (j < body.size() && is_file(body[j])) shape.from_file = body[j++] - 'a';
    if (j < body.size() && is_rank(body[j])) shape.from_rank = body[j++] - '1';
    if (j < body.size() && body[j] == 'x') {
        shape.capture_marker = true;
        ++j;
    }
    if (j != body.size()) return std::nullopt;

    if (shape.promotion != PieceType::None) {
        const int last = shape.to.rank();
        if (last != 0 && last != 7) return std::nullopt;
    }
    return shape;
}

SanResolution classify_san(const Board& board, std::string_view text) {
    SanResolution res;
    auto shape = parse_san_shape(normalize_san(text));
    if (!shape) return res;

    for (const Move& m : legal_moves(board)) {
        bool match = false;
        if (shape->castle) {
            match = m.castle == shape->castle_side;
        } else {
            match = m.moved == shape->piece && m.to == shape->to &&
                    (!shape->from_file || m.from.file() == *shape->from_file) &&
                    (!shape->from_rank || m.from.rank() == *shape->from_rank) &&
                    (shape->promotion == PieceType::None || m.promotion == shape->promotion);
        }
        if (match) res.matches.push_back(m);
    }
    if (res.matches.empty()) {
        res.verdict = SanVerdict::Illegal;
    } else if (res.matches.size() > 1) {
        res.verdict = SanVerdict::Ambiguous;
    } else {
        res.verdict = SanVerdict::Legal;
        res.move = res.matches.front();
    }
    return res;
}

Move parse_san(const Board& board, std::string_view text) {
    SanResolution res = classify_san(board, text);
    switch (res.verdict) {
        case SanVerdict::Legal: return *res.move;
        case SanVerdict::NotAMove: throw SanError(res.verdict, "not a SAN move: '" + std::string(text) + "'");
        case SanVerdict::Ambiguous: throw SanError(res.verdict, "ambiguous SAN: '" + std::string(text) + "'");
        case SanVerdict::Illegal: break;
    }
    throw SanError(SanVerdict::Illegal, "illegal SAN '" + std::string(text) + "' in " + board.fen());
}

std::string format_san(const Board& board, const Move& move) {
    const auto legal = legal_moves(board);
    if (std::find(legal.begin(), legal.end(), move) == legal.end())
        throw IllegalMoveError("cannot format illegal move " + move.uci() + " in " + board.fen());
    std::string out = format_without_suffix(legal, move);
    const Board next = apply_unchecked(board, move);
    if (in_check(next)) out += legal_moves(next).empty() ? '#' : '+';
    return out;
}

}  // namespace llmchess::chess
