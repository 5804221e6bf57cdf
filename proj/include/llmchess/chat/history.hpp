#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmchess/chat/message.hpp"

namespace llmchess::chat {

struct HistoryPolicy {
    enum class Kind { KeepAll, KeepReasoning, KeepDescription };
    Kind kind = Kind::KeepAll;
    int n = 1;

    static HistoryPolicy keep_all() { return {}; }
    static HistoryPolicy keep_reasoning(int n) { return {Kind::KeepReasoning, n}; }
    static HistoryPolicy keep_description(int n) { return {Kind::KeepDescription, n}; }

    void validate() const;  // std::invalid_argument when n < 1 for the counted kinds

    /// "keep-all", "keep-reasoning(8)", "keep-description(1)".
    std::string to_string() const;
    static HistoryPolicy parse(std::string_view text);

    friend bool operator==(const HistoryPolicy&, const HistoryPolicy&) = default;
};

void to_json(nlohmann::json& j, const HistoryPolicy& p);
void from_json(const nlohmann::json& j, HistoryPolicy& p);

/// Condenses all but the newest n matching messages. Messages are never
/// removed, so role alternation survives. Messages without a summary are
/// left intact.
void apply_policy(std::vector<ChatMessage>& messages, const HistoryPolicy& policy);

}  // namespace llmchess::chat
