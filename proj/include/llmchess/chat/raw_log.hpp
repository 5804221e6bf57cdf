#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace llmchess::chat {

/// Append-only JSON Lines log of session events and verbatim HTTP bodies.
/// Writes are flushed per line; safe to share between threads.
class RawLog {
public:
    RawLog() = default;  // in-memory only
    explicit RawLog(const std::filesystem::path& path);

    void append(const nlohmann::json& event);
    /// In-memory logs only; file-backed logs return nothing.
    std::vector<nlohmann::json> entries() const;

private:
    mutable std::mutex mu_;
    std::ofstream out_;
    std::vector<nlohmann::json> memory_;
    bool to_file_ = false;
};

}  // namespace llmchess::chat
