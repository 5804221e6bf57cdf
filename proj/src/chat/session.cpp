#include "llmchess/chat/session.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace llmchess::chat {

void SamplingParams::validate() const {
    if (model.empty()) throw AdapterConfigError("model id is empty");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw AdapterConfigError("temperature must lie in [0, 2]");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw AdapterConfigError("top_p must lie in (0, 1]");
}

void to_json(nlohmann::json& j, const SamplingParams& p) {
    j = nlohmann::json{{"model", p.model}, {"temperature", p.temperature}, {"top_p", p.top_p}};
}

void from_json(const nlohmann::json& j, SamplingParams& p) {
    p = SamplingParams{};
    p.model = j.value("model", p.model);
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.validate();
}

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
    const double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, retry - 1));
    return std::min(max_backoff, std::chrono::milliseconds(static_cast<std::int64_t>(ms)));
}

void to_json(nlohmann::json& j, const RetryPolicy& r) {
    j = nlohmann::json{{"max_retries", r.max_retries},
                       {"initial_backoff_ms", r.initial_backoff.count()},
                       {"multiplier", r.multiplier},
                       {"max_backoff_ms", r.max_backoff.count()}};
}

void from_json(const nlohmann::json& j, RetryPolicy& r) {
    r = RetryPolicy{};
    r.max_retries = j.value("max_retries", r.max_retries);
    r.initial_backoff = std::chrono::milliseconds(j.value("initial_backoff_ms", r.initial_backoff.count()));
    r.multiplier = j.value("multiplier", r.multiplier);
    r.max_backoff = std::chrono::milliseconds(j.value("max_backoff_ms", r.max_backoff.count()));
}

ChatSession::ChatSession(SamplingParams params, std::unique_ptr<ChatAdapter> adapter, RetryPolicy retry,
                         std::shared_ptr<RawLog> log)
    : params_(std::move(params)), adapter_(std::move(adapter)), retry_(std::move(retry)), log_(std::move(log)) {
    if (!adapter_) throw AdapterConfigError("session has no adapter");
    params_.validate();
    if (retry_.max_retries < 0) throw AdapterConfigError("max_retries must be >= 0");
    if (!retry_.sleep) retry_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

ChatSession create_session(const SamplingParams& params, std::unique_ptr<ChatAdapter> adapter, RetryPolicy retry,
                           std::shared_ptr<RawLog> log) {
    return ChatSession(params, std::move(adapter), std::move(retry), std::move(log));
}

std::string ChatSession::sample(const std::optional<std::string>& prefix) {
    AdapterRequest request;
    request.params = params_;
    request.log = log_.get();
    request.messages.reserve(transcript_.size());
    for (const ChatMessage& m : transcript_) request.messages.push_back({m.role, m.visible(), m.annotation, {}, false});

    last_fallback_ = false;
    if (prefix) {
        if (adapter_->supports_prefix()) {
            request.assistant_prefix = prefix;
        } else {
            request.messages.back().content += "\n\n" + *prefix;
            last_fallback_ = true;
            if (log_) log_->append({{"event", "prefix-fallback"}, {"slot", slot_}, {"prefix", *prefix}});
        }
    }

    int retries = 0;
    for (;;) {
        request.slot = slot_;
        request.attempt = attempt_++;
        try {
            std::string text = adapter_->generate(request);
            if (text.empty() && !prefix) throw TransportError("empty completion");
            last_retries_ = retries;
            total_retries_ += retries;
            if (log_)
                log_->append({{"event", "reply"}, {"slot", slot_}, {"attempt", request.attempt}, {"text", text}});
            return text;
        } catch (const TransportError& e) {
            if (log_)
                log_->append({{"event", "transport-error"}, {"slot", slot_}, {"attempt", request.attempt},
                              {"error", e.what()}});
            if (retries >= retry_.max_retries) {
                last_retries_ = retries;
                total_retries_ += retries;
                throw;
            }
            ++retries;
            retry_.sleep(retry_.backoff(retries));
        } catch (const RefusalError& e) {
            if (log_)
                log_->append({{"event", "refusal"}, {"slot", slot_}, {"attempt", request.attempt}, {"error", e.what()}});
            last_retries_ = retries;
            total_retries_ += retries;
            throw;
        }
    }
}

namespace {

std::string join_prefix(const std::optional<std::string>& prefix, const std::string& text) {
    if (!prefix) return text;
    if (text.empty()) return *prefix;
    return *prefix + " " + text;
}

}  // namespace

std::string ChatSession::complete(const std::vector<ChatMessage>& new_messages, const CompleteOptions& options) {
    std::vector<ChatMessage> next = transcript_;
    next.insert(next.end(), new_messages.begin(), new_messages.end());
    check_transcript(next);
    if (next.empty() || next.back().role != Role::User)
        throw SessionError("a completion needs the transcript to end with a user message");
    if (options.prune_before) apply_policy(next, *options.prune_before);
    transcript_ = std::move(next);

    ++slot_;
    attempt_ = 0;
    last_prefix_ = options.assistant_prefix;
    const std::string content = join_prefix(last_prefix_, sample(last_prefix_));
    transcript_.push_back(ChatMessage::assistant(content, options.annotation));
    return content;
}

std::string ChatSession::regenerate() {
    if (transcript_.empty() || transcript_.back().role != Role::Assistant)
        throw SessionError("regenerate needs an assistant message to replace");
    ChatMessage old = std::move(transcript_.back());
    transcript_.pop_back();
    rejected_.push_back({slot_, old.content});
    if (log_) log_->append({{"event", "regenerate"}, {"slot", slot_}, {"rejected", old.content}});
    std::string content;
    try {
        content = join_prefix(last_prefix_, sample(last_prefix_));
    } catch (...) {
        transcript_.push_back(std::move(old));
        rejected_.pop_back();
        throw;
    }
    transcript_.push_back(ChatMessage::assistant(content, old.annotation));
    return content;
}

void ChatSession::prune(const HistoryPolicy& policy) {
    apply_policy(transcript_, policy);
    check_transcript(transcript_);
}

void ChatSession::set_last_summary(std::string summary) {
    for (auto it = transcript_.rbegin(); it != transcript_.rend(); ++it) {
        if (it->role == Role::Assistant) {
            it->summary = std::move(summary);
            return;
        }
    }
    throw SessionError("no assistant message to summarise");
}

}  // namespace llmchess::chat
