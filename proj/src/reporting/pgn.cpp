#include "llmchess/reporting/pgn.hpp"

#include <cctype>

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"
#include "llmchess/orchestrator/audit.hpp"

namespace llmchess::reporting {

namespace {

constexpr std::size_t kLineWidth = 79;

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

bool is_result(std::string_view t) { return t == "1-0" || t == "0-1" || t == "1/2-1/2" || t == "*"; }

// Tag pair "[Name "Value"]" starting at `pos`; advances past the bracket.
std::pair<std::string, std::string> read_tag(std::string_view text, std::size_t& pos) {
    std::size_t i = pos + 1;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string name;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) name += text[i++];
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (name.empty() || i >= text.size() || text[i] != '"') throw PgnError("malformed tag pair");
    ++i;
    std::string value;
    for (;; ++i) {
        if (i >= text.size()) throw PgnError("unterminated tag value");
        if (text[i] == '\\' && i + 1 < text.size()) {
            value += text[++i];
            continue;
        }
        if (text[i] == '"') break;
        value += text[i];
    }
    ++i;
    while (i < text.size() && text[i] != ']') {
        if (!std::isspace(static_cast<unsigned char>(text[i]))) throw PgnError("malformed tag pair");
        ++i;
    }
    if (i >= text.size()) throw PgnError("unterminated tag pair");
    pos = i + 1;
    return {name, value};
}

}  // namespace

std::optional<std::string> PgnGame::tag(std::string_view name) const {
    for (const auto& [k, v] : tags)
        if (k == name) return v;
    return std::nullopt;
}

std::string export_pgn(const orchestrator::GameRecord& record) {
    try {
        orchestrator::replay_positions(record);
    } catch (const std::exception& e) {
        throw PgnError(fmt::format("game {} does not replay: {}", record.game_id, e.what()));
    }
    const std::string result = record.result();
    std::string out;
    auto tag = [&](std::string_view name, std::string_view value) {
        out += fmt::format("[{} \"{}\"]\n", name, escape(value));
    };
    tag("Event", record.variation);
    tag("Site", "?");
    tag("Date", "????.??.??");
    tag("Round", std::to_string(record.game_id));
    tag("White", record.engine.empty() ? "?" : record.engine);
    tag("Black", "model");
    tag("Result", result);
    tag("Termination", orchestrator::termination_name(record.termination));
    if (!record.failure.empty()) tag("FailureReason", record.failure);
    out += '\n';

    std::string line;
    auto emit = [&](const std::string& token) {
        if (!line.empty() && line.size() + 1 + token.size() > kLineWidth) {
            out += line + '\n';
            line.clear();
        }
        if (!line.empty()) line += ' ';
        line += token;
    };
    for (std::size_t i = 0; i < record.plies.size(); ++i) {
        if (i % 2 == 0) emit(fmt::format("{}.", i / 2 + 1));
        emit(record.plies[i].san);
    }
    emit(result);
    out += line + "\n";
    return out;
}

PgnGame import_pgn(std::string_view text) {
    PgnGame game;
    chess::Board board = chess::Board::initial();
    bool seen_result = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '[') {
            if (!game.sans.empty()) throw PgnError("tag pair after movetext");
            game.tags.push_back(read_tag(text, i));
        } else if (c == '{') {
            const auto end = text.find('}', i);
            if (end == std::string_view::npos) throw PgnError("unterminated comment");
            i = end + 1;
        } else if (c == ';') {
            const auto end = text.find('\n', i);
            i = end == std::string_view::npos ? text.size() : end + 1;
        } else if (c == '(') {
            int depth = 0;
            for (; i < text.size(); ++i) {
                if (text[i] == '(') ++depth;
                if (text[i] == ')' && --depth == 0) break;
            }
            if (depth != 0) throw PgnError("unterminated variation");
            ++i;
        } else {
            std::size_t end = i;
            while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) &&
                   std::string_view("{};()[").find(text[end]) == std::string_view::npos)
                ++end;
            std::string_view token = text.substr(i, end - i);
            i = end;
            if (is_result(token)) {
                if (seen_result) throw PgnError("second game in input");
                game.result = std::string(token);
                seen_result = true;
                continue;
            }
            if (seen_result) throw PgnError("movetext after the result");
            if (token.front() == '$') continue;
            std::size_t digits = 0;
            while (digits < token.size() && std::isdigit(static_cast<unsigned char>(token[digits]))) ++digits;
            if (digits > 0 && digits < token.size() && token[digits] == '.') {
                token.remove_prefix(digits);
                while (!token.empty() && token.front() == '.') token.remove_prefix(1);
                if (token.empty()) continue;
            }
            try {
                const chess::Move m = chess::parse_san(board, token);
                game.sans.push_back(chess::format_san(board, m));
                board = chess::apply_move(board, m);
            } catch (const chess::ChessError& e) {
                throw PgnError(fmt::format("ply {} '{}': {}", game.sans.size() + 1, token, e.what()));
            }
        }
    }
    if (auto declared = game.tag("Result"); declared && seen_result && *declared != game.result)
        throw PgnError(fmt::format("Result tag {} disagrees with movetext {}", *declared, game.result));
    if (!seen_result)
        if (auto declared = game.tag("Result")) game.result = *declared;
    return game;
}

}  // namespace llmchess::reporting
