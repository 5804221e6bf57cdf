#include "llmchess/chat/live.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

namespace llmchess::chat {

RateLimiter::RateLimiter(double requests_per_minute) {
    if (!(requests_per_minute > 0)) throw AdapterConfigError("rate limit must be positive");
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(60.0 / requests_per_minute));
    next_ = std::chrono::steady_clock::now();
}

void RateLimiter::acquire() {
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(mu_);
        const auto now = std::chrono::steady_clock::now();
        slot = std::max(now, next_);
        next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
}

void to_json(nlohmann::json& j, const LiveConfig& c) {
    j = nlohmann::json{{"base_url", c.base_url},
                       {"path", c.path},
                       {"api_key_env", c.api_key_env},
                       {"timeout_s", c.timeout.count()},
                       {"requests_per_minute", c.requests_per_minute},
                       {"native_prefix", c.native_prefix}};
}

void from_json(const nlohmann::json& j, LiveConfig& c) {
    c = LiveConfig{};
    c.base_url = j.value("base_url", c.base_url);
    c.path = j.value("path", c.path);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.timeout = std::chrono::seconds(j.value("timeout_s", c.timeout.count()));
    c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
    c.native_prefix = j.value("native_prefix", c.native_prefix);
}

nlohmann::json build_request_body(const AdapterRequest& request, bool native_prefix) {
    nlohmann::json messages = nlohmann::json::array();
    for (const ChatMessage& m : request.messages)
        messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    if (native_prefix && request.assistant_prefix)
        messages.push_back({{"role", "assistant"}, {"content", *request.assistant_prefix}});
    return {{"model", request.params.model},
            {"temperature", request.params.temperature},
            {"top_p", request.params.top_p},
            {"messages", messages}};
}

std::string parse_response_body(const nlohmann::json& body) {
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw TransportError("response has no choices");
    const auto& choice = body["choices"][0];
    if (choice.value("finish_reason", "") == "content_filter") throw RefusalError("response blocked by content filter");
    const auto& message = choice.at("message");
    if (message.contains("refusal") && !message["refusal"].is_null())
        throw RefusalError(message["refusal"].get<std::string>());
    if (!message.contains("content") || !message["content"].is_string())
        throw TransportError("response message has no content");
    return message["content"].get<std::string>();
}

LiveAdapter::LiveAdapter(LiveConfig config, std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) throw AdapterConfigError(fmt::format("environment variable {} is not set", config_.api_key_env));
    api_key_ = key;
    if (config_.base_url.empty()) throw AdapterConfigError("live adapter base_url is empty");
}

std::string LiveAdapter::generate(const AdapterRequest& request) {
    if (limiter_) limiter_->acquire();
    const nlohmann::json body = build_request_body(request, config_.native_prefix);
    const std::string payload = body.dump();

    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    const auto result = client.Post(config_.path, headers, payload, "application/json");

    nlohmann::json entry{{"event", "http"},
                         {"slot", request.slot},
                         {"attempt", request.attempt},
                         {"ts_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::system_clock::now().time_since_epoch())
                                       .count()},
                         {"request", body}};
    if (!result) {
        entry["error"] = httplib::to_string(result.error());
        if (request.log) request.log->append(entry);
        throw TransportError("HTTP request failed: " + httplib::to_string(result.error()));
    }
    entry["status"] = result->status;
    entry["response"] = result->body;
    if (request.log) request.log->append(entry);

    const int status = result->status;
    if (status == 429 || status >= 500) throw TransportError(fmt::format("HTTP {}", status));
    const auto parsed = nlohmann::json::parse(result->body, nullptr, false);
    if (status != 200) {
        if (!parsed.is_discarded() && parsed.contains("error")) {
            const auto& err = parsed["error"];
            const std::string code = err.is_object() ? err.value("code", "") : "";
            if (code == "content_filter" || code == "content_policy_violation")
                throw RefusalError(err.value("message", code));
        }
        throw AdapterConfigError(fmt::format("HTTP {}: {}", status, result->body.substr(0, 500)));
    }
    if (parsed.is_discarded()) throw TransportError("response body is not JSON");
    return parse_response_body(parsed);
}

}  // namespace llmchess::chat
