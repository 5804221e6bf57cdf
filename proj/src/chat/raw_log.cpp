#include "llmchess/chat/raw_log.hpp"

#include "llmchess/chat/message.hpp"

namespace llmchess::chat {

RawLog::RawLog(const std::filesystem::path& path) : out_(path, std::ios::app), to_file_(true) {
    if (!out_) throw ChatError("cannot open raw log " + path.string());
}

void RawLog::append(const nlohmann::json& event) {
    std::lock_guard lock(mu_);
    if (to_file_) {
        out_ << event.dump() << '\n';
        out_.flush();
    } else {
        memory_.push_back(event);
    }
}

std::vector<nlohmann::json> RawLog::entries() const {
    std::lock_guard lock(mu_);
    return memory_;
}

}  // namespace llmchess::chat
