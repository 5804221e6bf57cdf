#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "llmchess/chat/adapter.hpp"
#include "llmchess/chat/history.hpp"
#include "llmchess/chat/message.hpp"
#include "llmchess/chat/raw_log.hpp"

namespace llmchess::chat {

struct RetryPolicy {
    int max_retries = 5;
    std::chrono::milliseconds initial_backoff{1000};
    double multiplier = 2.0;
    std::chrono::milliseconds max_backoff{30000};
    /// Replaced in tests so backoff does not actually sleep.
    std::function<void(std::chrono::milliseconds)> sleep;

    std::chrono::milliseconds backoff(int retry) const;  // delay before retry number `retry` (1-based)
};

/// Sleep hook excluded; durations in milliseconds.
void to_json(nlohmann::json& j, const RetryPolicy& r);
void from_json(const nlohmann::json& j, RetryPolicy& r);

struct CompleteOptions {
    std::optional<std::string> assistant_prefix;
    std::optional<Annotation> annotation;  // tag for the stored assistant message
    /// Applied after the new messages are appended and before sampling, so
    /// the model never sees what the policy condenses.
    std::optional<HistoryPolicy> prune_before;
};

/// A response that regenerate() replaced.
struct RejectedResponse {
    int slot = 0;
    std::string content;
};

class ChatSession {
public:
    ChatSession(SamplingParams params, std::unique_ptr<ChatAdapter> adapter, RetryPolicy retry = {},
                std::shared_ptr<RawLog> log = nullptr);
    ChatSession(ChatSession&&) = default;
    ChatSession& operator=(ChatSession&&) = default;

    /// Appends `new_messages`, asks the adapter for a reply and stores it.
    /// Returns the stored assistant content, which begins with the prefix
    /// when one is given.
    std::string complete(const std::vector<ChatMessage>& new_messages, const CompleteOptions& options = {});

    /// Replaces the last assistant message with a fresh sample from the same
    /// context. The replaced text goes to rejected().
    std::string regenerate();

    void prune(const HistoryPolicy& policy);

    /// Sets the condensed form of the most recent assistant message.
    void set_last_summary(std::string summary);

    const std::vector<ChatMessage>& transcript() const noexcept { return transcript_; }
    const std::vector<RejectedResponse>& rejected() const noexcept { return rejected_; }
    const SamplingParams& params() const noexcept { return params_; }
    const ChatAdapter& adapter() const noexcept { return *adapter_; }
    RawLog* log() const noexcept { return log_.get(); }

    int last_retry_count() const noexcept { return last_retries_; }
    int total_retries() const noexcept { return total_retries_; }
    /// True when the last reply needed the prefix-in-user-message fallback.
    bool last_used_prefix_fallback() const noexcept { return last_fallback_; }

private:
    std::string sample(const std::optional<std::string>& prefix);

    SamplingParams params_;
    std::unique_ptr<ChatAdapter> adapter_;
    RetryPolicy retry_;
    std::shared_ptr<RawLog> log_;
    std::vector<ChatMessage> transcript_;
    std::vector<RejectedResponse> rejected_;
    std::optional<std::string> last_prefix_;
    int slot_ = -1;
    int attempt_ = 0;
    int last_retries_ = 0;
    int total_retries_ = 0;
    bool last_fallback_ = false;
};

/// Validates the parameters and binds a fresh, empty session.
ChatSession create_session(const SamplingParams& params, std::unique_ptr<ChatAdapter> adapter,
                           RetryPolicy retry = {}, std::shared_ptr<RawLog> log = nullptr);

/// Produces the adapter for a new session, e.g. one per game or per extraction.
using AdapterFactory = std::function<std::unique_ptr<ChatAdapter>()>;

}  // namespace llmchess::chat
