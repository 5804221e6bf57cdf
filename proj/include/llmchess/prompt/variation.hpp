#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmchess/chat/history.hpp"
#include "llmchess/chat/message.hpp"
#include "llmchess/prompt/describe.hpp"

namespace llmchess::prompt {

class VariationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ReasoningMode { None, Simple, Cot };
enum class ExtractionMode { Direct, LlmAssisted };
enum class RegenerationMode { Resample, ReminderAppend };

std::string_view reasoning_name(ReasoningMode m) noexcept;        // "none", "simple", "cot"
std::string_view extraction_name(ExtractionMode m) noexcept;      // "direct", "llm-assisted"
std::string_view regeneration_name(RegenerationMode m) noexcept;  // "resample", "reminder-append"

/// The nine built-in variation ids, in catalog order.
inline constexpr std::string_view kVariationIds[] = {"Baseline",   "Int-Illegal", "Int-Rules",
                                                     "Move-Repeat", "Move-IlgRem", "Rsn-Simple",
                                                     "Rsn-CoT",    "Rsn-DropCoT", "Dsc-Base"};

/// One prompt variation. Templates use named placeholders: {opening},
/// {rules}, {move}, {previous_moves}, {illegal_moves}, {description}.
struct VariationConfig {
    std::string id;
    std::string initial_template;
    std::string move_template;
    /// Replaces the move prompt after an illegal attempt (reminder-append only).
    std::string reminder_template;
    /// Condensed form of a description-bearing message once it ages out.
    std::string summary_template = "Move: {move}";
    chat::Role initial_role = chat::Role::User;
    chat::HistoryPolicy history;
    ReasoningMode reasoning = ReasoningMode::None;
    ExtractionMode extraction = ExtractionMode::Direct;
    RegenerationMode regeneration = RegenerationMode::Resample;
    /// Injected at the start of each reasoning turn (Rsn-CoT, Rsn-DropCoT).
    std::optional<std::string> cot_prefix;
    /// Rewrites "is a follows" to "is as follows" in rendered prompts.
    bool correct_typo = false;
    RelationMode relations = RelationMode::Pseudo;

    /// Placeholder and cross-field checks; throws VariationError.
    void validate() const;

    friend bool operator==(const VariationConfig&, const VariationConfig&) = default;
};

void to_json(nlohmann::json& j, const VariationConfig& c);
void from_json(const nlohmann::json& j, VariationConfig& c);

/// Built-in configuration for one of kVariationIds; throws VariationError otherwise.
VariationConfig builtin_variation(std::string_view id);
std::vector<VariationConfig> builtin_catalog();

VariationConfig load_variation(const std::string& path);

/// SHA-256 of the canonical config JSON plus every fixture it uses
/// (rules summary, extraction shots), hex encoded.
std::string config_hash(const VariationConfig& c);

/// Hashes of the shipped text fixtures, keyed by asset name.
std::map<std::string, std::string> fixture_hashes();

}  // namespace llmchess::prompt
