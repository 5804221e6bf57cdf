#pragma once

// Reads describe_board text back into relation sets so it can be compared
// against the python-chess fixture.

#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace llmchess::test {

struct ParsedPiece {
    std::string color;
    std::string piece;
    std::set<std::string> targets, attackers, defenders;
    std::optional<std::string> en_passant;
    // Piece names claimed for the squares in the lists.
    std::map<std::string, std::string> named;
};

struct ParsedDescription {
    std::map<std::string, ParsedPiece> pieces;  // by square
    std::map<std::string, int> counts;          // "white pawn" -> 8
    std::map<std::string, bool> castling;       // "white kingside" -> true
    std::vector<std::string> order;             // squares in sentence order
    std::vector<std::string> unparsed;
};

inline std::set<std::string> parse_list(const std::string& text, std::map<std::string, std::string>& named) {
    std::set<std::string> out;
    if (text == "nothing") return out;
    static const std::regex item(R"(the (king|queen|rook|bishop|knight|pawn) on ([a-h][1-8]))");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), item); it != std::sregex_iterator(); ++it) {
        out.insert((*it)[2]);
        named[(*it)[2]] = (*it)[1];
    }
    return out;
}

inline ParsedDescription parse_description(const std::string& text) {
    static const std::regex count_re(R"((White|Black) has (\d+) (king|queen|rook|bishop|knight|pawn)s? left\.)");
    static const std::regex piece_re(
        R"(A (king|queen|rook|bishop|knight|pawn) is on ([a-h][1-8]), can capture (.+), can be captured by (.+), and is defended by (.+?)\.( It can be captured en passant on ([a-h][36])\.)?)");
    static const std::regex castle_re(R"((White|Black) (has|does not have) (kingside|queenside) castling rights\.)");
    ParsedDescription out;
    std::istringstream in(text);
    std::string line, color = "white";
    std::smatch m;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (std::regex_match(line, m, count_re)) {
            color = m[1] == "White" ? "white" : "black";
            out.counts[color + " " + std::string(m[3])] = std::stoi(m[2]);
        } else if (std::regex_match(line, m, piece_re)) {
            ParsedPiece p;
            p.color = color;
            p.piece = m[1];
            p.targets = parse_list(m[3], p.named);
            p.attackers = parse_list(m[4], p.named);
            p.defenders = parse_list(m[5], p.named);
            if (m[7].matched) p.en_passant = m[7];
            out.order.push_back(m[2]);
            out.pieces[m[2]] = std::move(p);
        } else if (std::regex_match(line, m, castle_re)) {
            out.castling[(m[1] == "White" ? "white " : "black ") + std::string(m[3])] = m[2] == "has";
        } else {
            out.unparsed.push_back(line);
        }
    }
    return out;
}

/// Discrepancies between parsed text and one fixture row; empty when they agree.
inline std::vector<std::string> compare_with_oracle(const ParsedDescription& parsed, const nlohmann::json& row) {
    std::vector<std::string> issues;
    for (const auto& u : parsed.unparsed) issues.push_back("unparsed line: " + u);
    std::set<std::string> expected_squares;
    for (const auto& p : row["pieces"]) {
        const std::string sq = p["square"];
        expected_squares.insert(sq);
        auto it = parsed.pieces.find(sq);
        if (it == parsed.pieces.end()) {
            issues.push_back("missing piece on " + sq);
            continue;
        }
        const ParsedPiece& got = it->second;
        if (got.piece != p["piece"] || got.color != p["color"]) issues.push_back("wrong piece on " + sq);
        auto as_set = [](const nlohmann::json& arr) {
            std::set<std::string> s;
            for (const auto& x : arr) s.insert(x.get<std::string>());
            return s;
        };
        if (got.targets != as_set(p["targets"])) issues.push_back("targets differ on " + sq);
        if (got.attackers != as_set(p["attackers"])) issues.push_back("attackers differ on " + sq);
        if (got.defenders != as_set(p["defenders"])) issues.push_back("defenders differ on " + sq);
        const std::optional<std::string> ep =
            p["en_passant"].is_null() ? std::nullopt : std::optional<std::string>(p["en_passant"].get<std::string>());
        if (got.en_passant != ep) issues.push_back("en passant annotation differs on " + sq);
    }
    for (const auto& [sq, _] : parsed.pieces)
        if (!expected_squares.count(sq)) issues.push_back("extra piece on " + sq);
    return issues;
}

}  // namespace llmchess::test
