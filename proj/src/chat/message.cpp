#include "llmchess/chat/message.hpp"

#include <array>

#include <fmt/format.h>

namespace llmchess::chat {

namespace {

constexpr std::array<std::string_view, 3> kRoles{"system", "user", "assistant"};
constexpr std::array<std::string_view, 6> kAnnotations{"initial-prompt", "move-prompt",    "reasoning",
                                                        "description",    "reminder",       "extraction-shot"};

}  // namespace

std::string_view role_name(Role r) noexcept { return kRoles[static_cast<std::size_t>(r)]; }

Role role_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kRoles.size(); ++i)
        if (kRoles[i] == name) return static_cast<Role>(i);
    throw SessionError(fmt::format("unknown role '{}'", name));
}

std::string_view annotation_name(Annotation a) noexcept { return kAnnotations[static_cast<std::size_t>(a)]; }

Annotation annotation_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kAnnotations.size(); ++i)
        if (kAnnotations[i] == name) return static_cast<Annotation>(i);
    throw SessionError(fmt::format("unknown annotation '{}'", name));
}

void to_json(nlohmann::json& j, const ChatMessage& m) {
    j = nlohmann::json{{"role", role_name(m.role)}, {"content", m.content}};
    if (m.annotation) j["annotation"] = annotation_name(*m.annotation);
    if (m.summary) j["summary"] = *m.summary;
    if (m.condensed) j["condensed"] = true;
}

void from_json(const nlohmann::json& j, ChatMessage& m) {
    m = ChatMessage{};
    m.role = role_from_name(j.at("role").get<std::string>());
    m.content = j.at("content").get<std::string>();
    if (j.contains("annotation")) m.annotation = annotation_from_name(j.at("annotation").get<std::string>());
    if (j.contains("summary")) m.summary = j.at("summary").get<std::string>();
    m.condensed = j.value("condensed", false);
}

void check_transcript(const std::vector<ChatMessage>& messages) {
    std::size_t i = 0;
    if (!messages.empty() && messages[0].role == Role::System) i = 1;
    Role expected = Role::User;
    for (std::size_t k = 0; k < messages.size(); ++k) {
        if (messages[k].content.empty()) throw SessionError(fmt::format("message {} is empty", k));
        if (k < i) continue;
        if (messages[k].role != expected)
            throw SessionError(fmt::format("message {} has role {} where {} was expected", k,
                                           role_name(messages[k].role), role_name(expected)));
        expected = expected == Role::User ? Role::Assistant : Role::User;
    }
}

}  // namespace llmchess::chat
