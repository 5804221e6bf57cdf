#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "llmchess/chess/board.hpp"
#include "llmchess/chess/move.hpp"
#include "llmchess/engine/subprocess.hpp"
#include "llmchess/rng.hpp"

namespace llmchess::engine {

class EngineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ProtocolTimeout : public EngineError {
public:
    using EngineError::EngineError;
};
class OptionRejected : public EngineError {
public:
    using EngineError::EngineError;
};
class EngineCrashed : public EngineError {
public:
    using EngineError::EngineError;
};
class UnparsableOutput : public EngineError {
public:
    using EngineError::EngineError;
};

/// Engine score in UCI terms: centipawns or a signed mate distance.
struct EvalScore {
    enum class Kind { Centipawns, Mate };
    Kind kind = Kind::Centipawns;
    int value = 0;

    static EvalScore cp(int v) { return {Kind::Centipawns, v}; }
    static EvalScore mate(int n);  // throws std::invalid_argument for n == 0

    EvalScore negated() const { return {kind, -value}; }
    /// Mate-in-n maps to +/-(10000 - n) so mixed scores share one axis.
    int to_centipawns() const noexcept;

    friend bool operator==(const EvalScore&, const EvalScore&) = default;
};

constexpr int kMateScoreBase = 10000;

struct SearchLimit {
    enum class Kind { Nodes, Depth, MoveTime };
    Kind kind = Kind::Nodes;
    std::int64_t value = 1'000'000;

    static SearchLimit nodes(std::int64_t n) { return {Kind::Nodes, n}; }
    static SearchLimit depth(std::int64_t d) { return {Kind::Depth, d}; }
    static SearchLimit movetime(std::int64_t ms) { return {Kind::MoveTime, ms}; }

    std::string go_command() const;
    friend bool operator==(const SearchLimit&, const SearchLimit&) = default;
};

struct EngineConfig {
    std::string path = "stockfish";
    std::vector<std::string> args;
    SearchLimit limit;
    int multipv = 3;
    int hash_mb = 16;
    std::chrono::milliseconds handshake_timeout{5000};
    std::chrono::milliseconds search_timeout{120000};

    /// Throws std::invalid_argument when k < 1, the limit is non-positive or the path is empty.
    void validate() const;
};

void to_json(nlohmann::json& j, const EngineConfig& c);
void from_json(const nlohmann::json& j, EngineConfig& c);

struct RankedMove {
    chess::Move move;
    int rank = 0;  // 1-based
    EvalScore score;  // from the side to move's perspective, as reported by the engine
};

/// What the game loop needs from an engine. UciEngine is the production
/// implementation; tests can substitute their own.
class Engine {
public:
    virtual ~Engine() = default;

    /// Up to k ranked moves (fewer when fewer legal moves exist), all legal on `board`.
    virtual std::vector<RankedMove> top_moves(const chess::Board& board, int k) = 0;

    /// Centipawns from white's perspective; mate scores mapped via EvalScore::to_centipawns.
    /// Positions without legal moves are scored locally: mated side loses
    /// kMateScoreBase, stalemate is 0.
    int evaluate(const chess::Board& board);

protected:
    /// MultiPV width used for evaluation searches, so a following
    /// sample_reply on the same position can reuse the search.
    virtual int evaluation_breadth() const { return 1; }
};

/// A UCI engine running as a child process. One handle per game; not thread-safe.
class UciEngine final : public Engine {
public:
    /// Spawns and handshakes (uci/uciok, setoption MultiPV/Hash, isready/readyok).
    static std::unique_ptr<UciEngine> start(const EngineConfig& config);
    ~UciEngine() override;

    std::vector<RankedMove> top_moves(const chess::Board& board, int k) override;

    const EngineConfig& config() const noexcept { return config_; }
    int evaluation_breadth() const override { return config_.multipv; }
    const std::string& name() const noexcept { return name_; }

private:
    UciEngine(EngineConfig config, std::unique_ptr<Subprocess> process);
    void handshake();
    void set_multipv(int k);
    void sync(std::chrono::milliseconds timeout);
    std::string expect_line(std::chrono::milliseconds timeout, std::string_view waiting_for);

    EngineConfig config_;
    std::unique_ptr<Subprocess> process_;
    std::string name_;
    bool advertises_multipv_ = false;
    int current_multipv_ = 1;

    struct Cached {
        std::string fen;
        int k = 0;
        std::vector<RankedMove> moves;
    };
    std::optional<Cached> cache_;
};

/// Parses one UCI "info" line. Returns nullopt for lines without a usable
/// score+pv pair (currmove updates, bound-only scores, strings).
struct InfoLine {
    int multipv = 1;
    int depth = 0;
    EvalScore score;
    std::string first_move;
};
std::optional<InfoLine> parse_info_line(std::string_view line);

struct ReplySample {
    chess::Move move;
    std::vector<RankedMove> candidates;
    std::size_t chosen = 0;  // index into candidates
};

/// Uniform choice among top_moves(board, 3).
ReplySample sample_reply_detailed(Engine& engine, const chess::Board& board, Rng& rng);
chess::Move sample_reply(Engine& engine, const chess::Board& board, Rng& rng);

/// The four opening moves white chooses between, in sampling order.
inline constexpr std::string_view kOpenings[] = {"e4", "d4", "Nf3", "e3"};
std::string sample_opening(Rng& rng);

}  // namespace llmchess::engine
