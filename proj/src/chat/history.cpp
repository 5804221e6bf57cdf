#include "llmchess/chat/history.hpp"

#include <charconv>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

namespace llmchess::chat {

void HistoryPolicy::validate() const {
    if (kind != Kind::KeepAll && n < 1) throw std::invalid_argument("history policy count must be >= 1");
}

std::string HistoryPolicy::to_string() const {
    switch (kind) {
        case Kind::KeepAll: return "keep-all";
        case Kind::KeepReasoning: return fmt::format("keep-reasoning({})", n);
        case Kind::KeepDescription: return fmt::format("keep-description({})", n);
    }
    return "keep-all";
}

HistoryPolicy HistoryPolicy::parse(std::string_view text) {
    if (text == "keep-all") return keep_all();
    auto counted = [&](std::string_view head, Kind kind) -> std::optional<HistoryPolicy> {
        if (text.size() <= head.size() + 2 || text.substr(0, head.size()) != head || text[head.size()] != '(' ||
            text.back() != ')')
            return std::nullopt;
        const auto digits = text.substr(head.size() + 1, text.size() - head.size() - 2);
        int n = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc{} || p != digits.data() + digits.size()) return std::nullopt;
        HistoryPolicy policy{kind, n};
        policy.validate();
        return policy;
    };
    if (auto p = counted("keep-reasoning", Kind::KeepReasoning)) return *p;
    if (auto p = counted("keep-description", Kind::KeepDescription)) return *p;
    throw std::invalid_argument(fmt::format("bad history policy '{}'", text));
}

void to_json(nlohmann::json& j, const HistoryPolicy& p) { j = p.to_string(); }
void from_json(const nlohmann::json& j, HistoryPolicy& p) { p = HistoryPolicy::parse(j.get<std::string>()); }

void apply_policy(std::vector<ChatMessage>& messages, const HistoryPolicy& policy) {
    policy.validate();
    if (policy.kind == HistoryPolicy::Kind::KeepAll) return;
    const Annotation tag =
        policy.kind == HistoryPolicy::Kind::KeepReasoning ? Annotation::Reasoning : Annotation::Description;
    int seen = 0;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->annotation != tag) continue;
        if (++seen > policy.n && it->summary) it->condensed = true;
    }
}

}  // namespace llmchess::chat
