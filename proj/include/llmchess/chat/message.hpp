#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace llmchess::chat {

class ChatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Role alternation or message content violates the transcript rules.
class SessionError : public ChatError {
public:
    using ChatError::ChatError;
};

enum class Role { System, User, Assistant };

std::string_view role_name(Role r) noexcept;
Role role_from_name(std::string_view name);

/// Tags that history policies act on.
enum class Annotation { InitialPrompt, MovePrompt, Reasoning, Description, Reminder, ExtractionShot };

std::string_view annotation_name(Annotation a) noexcept;  // "initial-prompt", "move-prompt", ...
Annotation annotation_from_name(std::string_view name);

struct ChatMessage {
    Role role = Role::User;
    std::string content;
    std::optional<Annotation> annotation;
    /// Short form used once a history policy condenses the message
    /// (bare SAN for reasoning turns, the plain move line for descriptions).
    std::optional<std::string> summary;
    bool condensed = false;

    /// What the model sees.
    const std::string& visible() const noexcept { return condensed && summary ? *summary : content; }

    static ChatMessage system(std::string text, std::optional<Annotation> a = std::nullopt) {
        return {Role::System, std::move(text), a, std::nullopt, false};
    }
    static ChatMessage user(std::string text, std::optional<Annotation> a = std::nullopt) {
        return {Role::User, std::move(text), a, std::nullopt, false};
    }
    static ChatMessage assistant(std::string text, std::optional<Annotation> a = std::nullopt) {
        return {Role::Assistant, std::move(text), a, std::nullopt, false};
    }

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);

/// Throws SessionError unless: non-empty contents, at most one leading
/// system message, then user/assistant strictly alternating from a user turn.
void check_transcript(const std::vector<ChatMessage>& messages);

}  // namespace llmchess::chat
