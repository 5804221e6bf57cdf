#include "llmchess/prompt/variation.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "llmchess/hash.hpp"
#include "llmchess/prompt/assets.hpp"
#include "llmchess/prompt/templates.hpp"

namespace llmchess::prompt {

namespace {

constexpr std::string_view kIntro =
    "I want you to act as a rival chess player. I will start as white, and we will say our moves in reciprocal "
    "order. After my first message, I will just write my move. ";
constexpr std::string_view kNoExplain = "Please don't explain your decision and just reply with your move.";
constexpr std::string_view kDescribeMove =
    "Move: {move}\n\nAfter my move, the board state is a follows:\n{description}\n\nPlease make your next move.";

template <typename Enum, std::size_t N>
Enum enum_from(std::string_view name, const std::array<std::string_view, N>& names, std::string_view what) {
    for (std::size_t i = 0; i < N; ++i)
        if (names[i] == name) return static_cast<Enum>(i);
    throw VariationError(fmt::format("unknown {} '{}'", what, name));
}

constexpr std::array<std::string_view, 3> kReasoning{"none", "simple", "cot"};
constexpr std::array<std::string_view, 2> kExtraction{"direct", "llm-assisted"};
constexpr std::array<std::string_view, 2> kRegeneration{"resample", "reminder-append"};

void check_names(std::string_view field, std::string_view tpl, std::initializer_list<std::string_view> allowed,
                 std::initializer_list<std::string_view> required) {
    std::vector<std::string> names;
    try {
        names = placeholders(tpl);
    } catch (const VariationError& e) {
        throw VariationError(fmt::format("{}: {}", field, e.what()));
    }
    for (const auto& n : names)
        if (std::find(allowed.begin(), allowed.end(), n) == allowed.end())
            throw VariationError(fmt::format("{} uses unknown placeholder {{{}}}", field, n));
    for (auto r : required)
        if (std::find(names.begin(), names.end(), r) == names.end())
            throw VariationError(fmt::format("{} must contain {{{}}}", field, r));
}

bool is_builtin(std::string_view id) {
    return std::find(std::begin(kVariationIds), std::end(kVariationIds), id) != std::end(kVariationIds);
}

}  // namespace

std::string_view reasoning_name(ReasoningMode m) noexcept { return kReasoning[static_cast<std::size_t>(m)]; }
std::string_view extraction_name(ExtractionMode m) noexcept { return kExtraction[static_cast<std::size_t>(m)]; }
std::string_view regeneration_name(RegenerationMode m) noexcept { return kRegeneration[static_cast<std::size_t>(m)]; }

void VariationConfig::validate() const {
    if (id.empty()) throw VariationError("variation id is empty");
    check_names("initial_template", initial_template, {"opening", "rules", "description"}, {"opening"});
    check_names("move_template", move_template, {"move", "previous_moves", "description"}, {"move"});
    check_names("summary_template", summary_template, {"move", "previous_moves"}, {"move"});
    if (!reminder_template.empty())
        check_names("reminder_template", reminder_template, {"move", "previous_moves", "description", "illegal_moves"},
                    {"move", "illegal_moves"});
    if (regeneration == RegenerationMode::ReminderAppend && reminder_template.empty())
        throw VariationError(id + ": reminder-append needs a reminder_template");
    if (initial_role == chat::Role::Assistant) throw VariationError(id + ": initial prompt cannot be an assistant turn");
    if (reasoning == ReasoningMode::Cot && (!cot_prefix || cot_prefix->empty()))
        throw VariationError(id + ": chain-of-thought reasoning needs a cot_prefix");
    try {
        history.validate();
    } catch (const std::invalid_argument& e) {
        throw VariationError(id + ": " + e.what());
    }

    if (id == "Move-IlgRem" && regeneration != RegenerationMode::ReminderAppend)
        throw VariationError("Move-IlgRem must use reminder-append regeneration");
    if (id.rfind("Rsn-", 0) == 0 && is_builtin(id) && extraction != ExtractionMode::LlmAssisted)
        throw VariationError(id + " must use llm-assisted extraction");
    if (id == "Dsc-Base" && history != chat::HistoryPolicy::keep_description(1))
        throw VariationError("Dsc-Base must use keep-description(1)");
}

void to_json(nlohmann::json& j, const VariationConfig& c) {
    j = nlohmann::json{{"id", c.id},
                       {"initial_template", c.initial_template},
                       {"move_template", c.move_template},
                       {"reminder_template", c.reminder_template},
                       {"summary_template", c.summary_template},
                       {"initial_role", chat::role_name(c.initial_role)},
                       {"history", c.history},
                       {"reasoning", reasoning_name(c.reasoning)},
                       {"extraction", extraction_name(c.extraction)},
                       {"regeneration", regeneration_name(c.regeneration)},
                       {"cot_prefix", c.cot_prefix ? nlohmann::json(*c.cot_prefix) : nlohmann::json(nullptr)},
                       {"correct_typo", c.correct_typo},
                       {"relations", relation_mode_name(c.relations)}};
}

void from_json(const nlohmann::json& j, VariationConfig& c) {
    c = VariationConfig{};
    c.id = j.at("id").get<std::string>();
    c.initial_template = j.at("initial_template").get<std::string>();
    c.move_template = j.at("move_template").get<std::string>();
    c.reminder_template = j.value("reminder_template", "");
    c.summary_template = j.value("summary_template", c.summary_template);
    c.initial_role = chat::role_from_name(j.value("initial_role", "user"));
    c.history = chat::HistoryPolicy::parse(j.value("history", "keep-all"));
    c.reasoning = enum_from<ReasoningMode>(j.value("reasoning", "none"), kReasoning, "reasoning mode");
    c.extraction = enum_from<ExtractionMode>(j.value("extraction", "direct"), kExtraction, "extraction mode");
    c.regeneration = enum_from<RegenerationMode>(j.value("regeneration", "resample"), kRegeneration, "regeneration mode");
    if (j.contains("cot_prefix") && !j["cot_prefix"].is_null()) c.cot_prefix = j["cot_prefix"].get<std::string>();
    c.correct_typo = j.value("correct_typo", false);
    c.relations = relation_mode_from_name(j.value("relations", "pseudo"));
    c.validate();
}

VariationConfig builtin_variation(std::string_view id) {
    VariationConfig c;
    c.id = std::string(id);
    c.initial_template = fmt::format("{}{}\n\n{{opening}}", kIntro, kNoExplain);
    c.move_template = "Move: {move}";

    if (id == "Baseline") {
    } else if (id == "Int-Illegal") {
        c.initial_template += "\n\nPlease do not make illegal moves.";
    } else if (id == "Int-Rules") {
        c.initial_template = fmt::format("{}{}\n\nThe rules of chess are summarised below.\n\n{{rules}}\n\n{{opening}}",
                                         kIntro, kNoExplain);
    } else if (id == "Move-Repeat") {
        c.move_template = "Move: {move}, Previous Moves: {previous_moves}";
    } else if (id == "Move-IlgRem") {
        c.reminder_template = "Move: {move} (moves {illegal_moves} are illegal).";
        c.regeneration = RegenerationMode::ReminderAppend;
    } else if (id == "Rsn-Simple") {
        c.initial_template = fmt::format("{}Please analyze the board and explain your move.\n\n{{opening}}", kIntro);
        c.reasoning = ReasoningMode::Simple;
        c.extraction = ExtractionMode::LlmAssisted;
        c.history = chat::HistoryPolicy::keep_reasoning(1);
    } else if (id == "Rsn-CoT" || id == "Rsn-DropCoT") {
        c.initial_template = fmt::format(
            "{}Please analyze the board, provide a step-by-step analysis and explain your move.\n\n{{opening}}", kIntro);
        c.reasoning = ReasoningMode::Cot;
        c.extraction = ExtractionMode::LlmAssisted;
        c.cot_prefix = "Let's think step by step.";
        c.history = chat::HistoryPolicy::keep_reasoning(id == "Rsn-CoT" ? 8 : 1);
    } else if (id == "Dsc-Base") {
        c.move_template = std::string(kDescribeMove);
        c.history = chat::HistoryPolicy::keep_description(1);
    } else {
        throw VariationError(fmt::format("unknown variation '{}'", id));
    }
    c.validate();
    return c;
}

std::vector<VariationConfig> builtin_catalog() {
    std::vector<VariationConfig> out;
    for (auto id : kVariationIds) out.push_back(builtin_variation(id));
    return out;
}

VariationConfig load_variation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw VariationError("cannot open variation file " + path);
    try {
        return nlohmann::json::parse(in).get<VariationConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw VariationError(fmt::format("{}: {}", path, e.what()));
    }
}

std::string config_hash(const VariationConfig& c) {
    std::string data = nlohmann::json(c).dump();
    const auto names = placeholders(c.initial_template);
    if (std::find(names.begin(), names.end(), "rules") != names.end()) {
        data += "\nrules_summary:";
        data += assets::rules_summary;
    }
    if (c.extraction == ExtractionMode::LlmAssisted) {
        data += "\nextraction_shots:";
        data += assets::extraction_shots;
    }
    return sha256_hex(data);
}

std::map<std::string, std::string> fixture_hashes() {
    return {{"rules_summary", sha256_hex(assets::rules_summary)},
            {"extraction_shots", sha256_hex(assets::extraction_shots)}};
}

}  // namespace llmchess::prompt
