#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "llmchess/chat/adapter.hpp"

namespace llmchess::chat {

/// Minimum spacing between requests, shared by every adapter holding it.
class RateLimiter {
public:
    explicit RateLimiter(double requests_per_minute);
    void acquire();

private:
    std::mutex mu_;
    std::chrono::steady_clock::duration interval_;
    std::chrono::steady_clock::time_point next_;
};

struct LiveConfig {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";
    std::chrono::seconds timeout{120};
    double requests_per_minute = 60;
    /// Send the assistant prefix as a trailing assistant message instead of
    /// folding it into the last user message.
    bool native_prefix = false;
};

void to_json(nlohmann::json& j, const LiveConfig& c);
void from_json(const nlohmann::json& j, LiveConfig& c);

/// Builds the chat-completions request body.
nlohmann::json build_request_body(const AdapterRequest& request, bool native_prefix);

/// Pulls the reply text out of a chat-completions response body. Throws
/// RefusalError for refusals or content filtering, TransportError for bodies
/// that carry no choice.
std::string parse_response_body(const nlohmann::json& body);

/// OpenAI-compatible HTTPS backend. The key is read from the environment
/// at construction; a missing key is a configuration error.
class LiveAdapter final : public ChatAdapter {
public:
    LiveAdapter(LiveConfig config, std::shared_ptr<RateLimiter> limiter);

    std::string generate(const AdapterRequest& request) override;
    bool supports_prefix() const override { return config_.native_prefix; }
    std::string name() const override { return "live"; }

private:
    LiveConfig config_;
    std::shared_ptr<RateLimiter> limiter_;
    std::string api_key_;
};

}  // namespace llmchess::chat
