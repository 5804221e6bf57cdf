#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmchess/chat/session.hpp"

namespace llmchess::extract {

enum class Method { Direct, LlmAssisted };
std::string_view method_name(Method m) noexcept;  // "direct", "llm-assisted"
Method method_from_name(std::string_view name);

struct ExtractionResult {
    std::optional<std::string> candidate;  // SAN-shaped when present
    Method method = Method::Direct;
    std::string raw;
    std::vector<std::string> tokens;  // every SAN-shaped token, in order
    /// The LLM extractor answered with something that is not SAN, so the
    /// direct scan decided.
    bool fallback = false;
    std::optional<std::string> extractor_output;
};

void to_json(nlohmann::json& j, const ExtractionResult& r);
void from_json(const nlohmann::json& j, ExtractionResult& r);

/// Strips quotes, brackets, trailing punctuation and a leading move number
/// ("12.", "3...") from one whitespace-delimited word.
std::string clean_token(std::string_view word);

/// Every SAN-shaped token of `text`, cleaned, in order of appearance.
std::vector<std::string> san_tokens(std::string_view text);

/// Candidate = the last SAN-shaped token.
ExtractionResult extract_direct(std::string_view response);

struct Shot {
    std::string input;
    std::string output;
};

/// Parses "=== INPUT" / "=== OUTPUT" blocks.
std::vector<Shot> parse_shots(std::string_view text);

/// The shipped eight-shot fixture.
const std::vector<Shot>& default_shots();

inline constexpr std::string_view kExtractionInstruction =
    "You extract the final chess move from a player's message. Reply with that move in Standard Algebraic "
    "Notation and nothing else.";

/// System instruction, the shots as user/assistant pairs, then `response`.
std::vector<chat::ChatMessage> extraction_messages(const std::vector<Shot>& shots, std::string_view response);

using SessionFactory = std::function<chat::ChatSession()>;

/// Runs one fresh extraction session per call. Transport and refusal
/// errors propagate.
ExtractionResult extract_llm(std::string_view response, const SessionFactory& factory,
                             const std::vector<Shot>& shots = default_shots());

}  // namespace llmchess::extract
