#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "llmchess/chat/live.hpp"
#include "llmchess/chat/session.hpp"
#include "llmchess/engine/engine.hpp"
#include "llmchess/orchestrator/game.hpp"
#include "llmchess/orchestrator/synthetic.hpp"
#include "llmchess/prompt/variation.hpp"

namespace llmchess::orchestrator {

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kManifestVersion = 1;

/// Engine path that selects the in-process MaterialEngine instead of a UCI binary.
inline constexpr std::string_view kBuiltinEngine = "builtin:material";

struct AdapterSpec {
    enum class Kind { Mock, Live };
    Kind kind = Kind::Mock;
    chat::SamplingParams sampling;
    chat::RetryPolicy retry;
    /// Mock mode: a script file shared by all games, or a directory holding
    /// game-<id>.jsonl files with default.jsonl as fallback. Without one the
    /// synthetic population plays.
    std::optional<std::filesystem::path> mock_script;
    SyntheticPopulation synthetic;
    chat::LiveConfig live;
};

struct Manifest {
    int version = kManifestVersion;
    prompt::VariationConfig variation = prompt::builtin_variation("Baseline");
    engine::EngineConfig engine;
    AdapterSpec adapter;
    std::uint64_t seed = 0;
    int games = 1;
    int parallelism = 1;
    int move_cap = kDefaultMoveCap;
    std::string created_at;  // informational; set by the CLI

    void validate() const;

    /// Relative paths inside the file resolve against its directory.
    static Manifest load(const std::filesystem::path& path);
};

std::string_view adapter_kind_name(AdapterSpec::Kind k) noexcept;  // "mock", "live"
AdapterSpec::Kind adapter_kind_from_name(std::string_view name);

void to_json(nlohmann::json& j, const AdapterSpec& a);
void from_json(const nlohmann::json& j, AdapterSpec& a);
/// The written form inlines the variation with its hash and fixture hashes.
void to_json(nlohmann::json& j, const Manifest& m);
void from_json(const nlohmann::json& j, Manifest& m);

/// Starts an engine for one game.
std::unique_ptr<engine::Engine> start_engine(const engine::EngineConfig& config, std::string* name = nullptr);

/// Receives finished games in game-id order, one call at a time.
class GameSink {
public:
    virtual ~GameSink() = default;
    virtual void write(const GameOutput& game) = 0;
};

struct RunOptions {
    /// Per-game raw session logs go to <raw_dir>/game-<id>.jsonl; none when empty.
    std::filesystem::path raw_dir;
    GameSink* sink = nullptr;
    /// Called from worker threads as games finish, in completion order.
    std::function<void(const GameRecord&)> progress;
};

/// Per-game seed for game `game_id` (1-based).
inline std::uint64_t game_seed(std::uint64_t master, std::uint64_t game_id) { return derive_seed(master, game_id); }

/// Plays manifest.games games on manifest.parallelism threads. Records come
/// back ordered by game id. Exceptions other than per-game transport
/// failures (engine start-up, bad scripts) stop the run and propagate.
std::vector<GameRecord> run_experiment(const Manifest& manifest, const RunOptions& options = {});

/// The adapters the manifest asks for, for one game or probe session.
struct Backends {
    std::unique_ptr<chat::ChatAdapter> player;
    chat::AdapterFactory extractor;
};
/// `limiter` paces live requests across games; one is created when null.
Backends make_backends(const Manifest& manifest, std::uint64_t game_id, std::uint64_t seed,
                       const std::shared_ptr<PositionFeed>& feed,
                       std::shared_ptr<chat::RateLimiter> limiter = nullptr);

}  // namespace llmchess::orchestrator
