#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmchess/chat/message.hpp"
#include "llmchess/chat/raw_log.hpp"

namespace llmchess::chat {

/// Network or server-side failure; the session retries these.
class TransportError : public ChatError {
public:
    using ChatError::ChatError;
};

/// The backend declined to answer (content policy). Never retried.
class RefusalError : public ChatError {
public:
    using ChatError::ChatError;
};

class AdapterConfigError : public ChatError {
public:
    using ChatError::ChatError;
};

struct SamplingParams {
    std::string model = "gpt-3.5-turbo-0301";
    double temperature = 1.0;
    double top_p = 0.9;

    void validate() const;  // AdapterConfigError on out-of-range values
    friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

void to_json(nlohmann::json& j, const SamplingParams& p);
void from_json(const nlohmann::json& j, SamplingParams& p);

struct AdapterRequest {
    /// Visible contents, in order; ends with a user turn.
    std::vector<ChatMessage> messages;
    SamplingParams params;
    /// Text the reply must continue from. Only set for adapters that
    /// report supports_prefix().
    std::optional<std::string> assistant_prefix;
    int slot = 0;     // assistant turn index within the session, 0-based
    int attempt = 0;  // adapter calls already made for this slot
    RawLog* log = nullptr;
};

/// A chat backend. One instance per session; not shared across threads.
class ChatAdapter {
public:
    virtual ~ChatAdapter() = default;

    /// Returns the continuation text (without any assistant prefix).
    /// Throws TransportError or RefusalError.
    virtual std::string generate(const AdapterRequest& request) = 0;

    virtual bool supports_prefix() const { return false; }
    virtual std::string name() const = 0;
};

}  // namespace llmchess::chat
