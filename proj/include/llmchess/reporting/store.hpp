#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmchess/orchestrator/experiment.hpp"
#include "llmchess/orchestrator/records.hpp"

namespace llmchess::reporting {

using orchestrator::GameRecord;
using orchestrator::ProbeRecord;

inline constexpr int kSchemaVersion = 1;

inline constexpr const char* kGamesFile = "games.jsonl";
inline constexpr const char* kTranscriptsFile = "transcripts.jsonl";
inline constexpr const char* kProbesFile = "probes.jsonl";
inline constexpr const char* kManifestFile = "manifest.json";

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A stored line was written under another schema version (or none).
class SchemaError : public StoreError {
public:
    SchemaError(int found, const std::string& what) : StoreError(what), found_(found) {}
    int found() const noexcept { return found_; }  // -1 when the field is missing

private:
    int found_;
};

/// Serialized JSON Lines writer. Each line is formatted in full before the
/// lock is taken and written with a single call, so concurrent writers
/// never interleave.
class JsonlWriter {
public:
    enum class Mode { Truncate, Append };
    explicit JsonlWriter(const std::filesystem::path& path, Mode mode = Mode::Truncate);

    void write(const nlohmann::json& line);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
    std::mutex mu_;
    std::ofstream out_;
};

nlohmann::json encode_game(const GameRecord& record);
/// Throws SchemaError on a version mismatch.
GameRecord decode_game(const nlohmann::json& line);
nlohmann::json encode_probe(const ProbeRecord& probe);
ProbeRecord decode_probe(const nlohmann::json& line);
nlohmann::json encode_transcript(const orchestrator::GameOutput& out);

void persist_game(const GameRecord& record, JsonlWriter& sink);

/// Whole-file readers; errors name the file and line.
std::vector<GameRecord> read_games(const std::filesystem::path& path);
std::vector<ProbeRecord> read_probes(const std::filesystem::path& path);
void write_probes(const std::filesystem::path& path, const std::vector<ProbeRecord>& probes);
/// The stored transcript entry for `game_id`, if any.
std::optional<nlohmann::json> find_transcript(const std::filesystem::path& path, std::uint64_t game_id);

/// Run output directory: games.jsonl plus transcripts.jsonl, written in
/// game-id order through run_experiment's ordered sink.
class RunStore final : public orchestrator::GameSink {
public:
    explicit RunStore(const std::filesystem::path& dir);
    void write(const orchestrator::GameOutput& out) override;

private:
    JsonlWriter games_;
    JsonlWriter transcripts_;
};

void write_manifest(const std::filesystem::path& path, const orchestrator::Manifest& manifest);

}  // namespace llmchess::reporting
