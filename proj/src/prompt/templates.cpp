#include "llmchess/prompt/templates.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "llmchess/prompt/assets.hpp"

namespace llmchess::prompt {

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls on_text for literal runs and on_name for each placeholder.
template <typename Text, typename Name>
void scan(std::string_view tpl, Text on_text, Name on_name) {
    std::size_t i = 0;
    while (i < tpl.size()) {
        const char c = tpl[i];
        if ((c == '{' || c == '}') && i + 1 < tpl.size() && tpl[i + 1] == c) {
            on_text(std::string_view(&tpl[i], 1));
            i += 2;
            continue;
        }
        if (c == '{') {
            std::size_t j = i + 1;
            while (j < tpl.size() && is_name_char(tpl[j])) ++j;
            if (j == i + 1 || j >= tpl.size() || tpl[j] != '}')
                throw VariationError(fmt::format("malformed placeholder at offset {} in template", i));
            on_name(tpl.substr(i + 1, j - i - 1));
            i = j + 1;
            continue;
        }
        if (c == '}') throw VariationError(fmt::format("stray '}}' at offset {} in template", i));
        const std::size_t next = tpl.find_first_of("{}", i);
        const std::size_t end = next == std::string_view::npos ? tpl.size() : next;
        on_text(tpl.substr(i, end - i));
        i = end;
    }
}

constexpr std::string_view kTypo = "the board state is a follows";
constexpr std::string_view kFixed = "the board state is as follows";

std::string finish(const VariationConfig& c, std::string text) {
    if (!c.correct_typo) return text;
    for (std::size_t at = text.find(kTypo); at != std::string::npos; at = text.find(kTypo, at + kFixed.size()))
        text.replace(at, kTypo.size(), kFixed);
    return text;
}

bool uses(std::string_view tpl, std::string_view name) {
    const auto names = placeholders(tpl);
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::map<std::string, std::string> move_values(const VariationConfig& c, std::string_view engine_move,
                                               const std::vector<std::string>& plies, const chess::Board& board,
                                               std::string_view tpl) {
    std::map<std::string, std::string> values{{"move", std::string(engine_move)}};
    if (uses(tpl, "previous_moves") || uses(c.summary_template, "previous_moves"))
        values["previous_moves"] = numbered_movetext(plies);
    if (uses(tpl, "description")) values["description"] = describe_board(board, c.relations);
    return values;
}

Prompt with_summary(const VariationConfig& c, std::string_view tpl, const std::map<std::string, std::string>& values) {
    Prompt p{finish(c, render(tpl, values)), {}};
    p.summary = uses(tpl, "description") ? finish(c, render(c.summary_template, values)) : p.text;
    return p;
}

}  // namespace

std::string render(std::string_view tpl, const std::map<std::string, std::string>& values) {
    std::string out;
    scan(
        tpl, [&](std::string_view text) { out += text; },
        [&](std::string_view name) {
            auto it = values.find(std::string(name));
            if (it == values.end()) throw VariationError(fmt::format("no value for placeholder {{{}}}", name));
            out += it->second;
        });
    return out;
}

std::vector<std::string> placeholders(std::string_view tpl) {
    std::vector<std::string> names;
    scan(
        tpl, [](std::string_view) {},
        [&](std::string_view name) {
            if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
        });
    return names;
}

std::string numbered_movetext(const std::vector<std::string>& plies) {
    std::string out;
    for (std::size_t i = 0; i < plies.size(); ++i) {
        if (i) out += ' ';
        if (i % 2 == 0) out += fmt::format("{}. ", i / 2 + 1);
        out += plies[i];
    }
    return out;
}

std::string join_moves(const std::vector<std::string>& sans) {
    std::string out;
    for (std::size_t i = 0; i < sans.size(); ++i) {
        if (i) out += ", ";
        out += sans[i];
    }
    return out;
}

Prompt initial_prompt(const VariationConfig& c, std::string_view opening, const chess::Board& board) {
    if (opening.empty()) throw VariationError("opening move is empty");
    std::map<std::string, std::string> values{{"opening", std::string(opening)}};
    if (uses(c.initial_template, "rules")) values["rules"] = std::string(rules_summary());
    if (uses(c.initial_template, "description")) values["description"] = describe_board(board, c.relations);
    Prompt p{finish(c, render(c.initial_template, values)), {}};
    p.summary = p.text;
    return p;
}

Prompt move_prompt(const VariationConfig& c, std::string_view engine_move, const std::vector<std::string>& plies,
                   const chess::Board& board) {
    return with_summary(c, c.move_template, move_values(c, engine_move, plies, board, c.move_template));
}

Prompt reminder_prompt(const VariationConfig& c, std::string_view engine_move, const std::vector<std::string>& plies,
                       const chess::Board& board, const std::vector<std::string>& illegal) {
    if (illegal.empty() || c.reminder_template.empty()) return move_prompt(c, engine_move, plies, board);
    auto values = move_values(c, engine_move, plies, board, c.reminder_template);
    values["illegal_moves"] = join_moves(illegal);
    return with_summary(c, c.reminder_template, values);
}

std::string_view rules_summary() {
    std::string_view text = assets::rules_summary;
    while (!text.empty() && (text.back() == '\n' || text.back() == ' ')) text.remove_suffix(1);
    return text;
}

}  // namespace llmchess::prompt
