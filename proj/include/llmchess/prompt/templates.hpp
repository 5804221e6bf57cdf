#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "llmchess/chess/board.hpp"
#include "llmchess/prompt/variation.hpp"

namespace llmchess::prompt {

/// Substitutes {name} placeholders. Unknown or missing names throw
/// VariationError; "{{" and "}}" produce literal braces.
std::string render(std::string_view tpl, const std::map<std::string, std::string>& values);

/// Names of the placeholders used by `tpl`, in order of first use.
std::vector<std::string> placeholders(std::string_view tpl);

/// "1. Nf3 d5 2. d4 e6 3. g3" for plies played from the start position.
std::string numbered_movetext(const std::vector<std::string>& plies);

/// "b2, c5".
std::string join_moves(const std::vector<std::string>& sans);

struct Prompt {
    std::string text;
    std::string summary;  // condensed form (description variations)
};

/// `board` is the position after the opening; only description variations read it.
Prompt initial_prompt(const VariationConfig& c, std::string_view opening, const chess::Board& board);

/// `plies` is the whole game so far, including `engine_move`; `board` is the current position.
Prompt move_prompt(const VariationConfig& c, std::string_view engine_move, const std::vector<std::string>& plies,
                   const chess::Board& board);

/// Retry prompt for reminder-append variations. Falls back to move_prompt
/// when `illegal` is empty.
Prompt reminder_prompt(const VariationConfig& c, std::string_view engine_move, const std::vector<std::string>& plies,
                       const chess::Board& board, const std::vector<std::string>& illegal);

/// Returns the shipped rules-summary document.
std::string_view rules_summary();

}  // namespace llmchess::prompt
