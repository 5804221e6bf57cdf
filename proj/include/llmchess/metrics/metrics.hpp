#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "llmchess/orchestrator/records.hpp"

namespace llmchess::metrics {

using orchestrator::GameRecord;

class MetricsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Identity of an illegal attempt for repetition counting: the normalized
/// SAN candidate, or the whitespace-collapsed lowercase reply when no
/// candidate was extracted.
std::string attempt_identity(const orchestrator::Attempt& a);

/// Per offending move: total illegal attempts and per-identity counts.
struct IllegalAttemptProfile {
    struct Move {
        int index = 0;
        int attempts = 0;
        std::map<std::string, int> counts;
    };
    std::vector<Move> moves;
};

IllegalAttemptProfile illegal_profile(const GameRecord& game);

/// Number of attempt logs, the last one possibly unfinished.
int moves_available(const GameRecord& game) noexcept;

/// (sum of P_j for j <= t) / t. Throws MetricsError unless 1 <= t <= moves_available.
double imr(const GameRecord& game, int t);
/// (sum r_j) / (sum P_j) over j <= t; nullopt when no move up to t offended.
std::optional<double> rblm(const GameRecord& game, int t);
/// Mean over offending moves of sum_j (c_j / a)^2; nullopt without offending moves.
std::optional<double> mrs(const IllegalAttemptProfile& profile);
std::optional<double> mrs(const GameRecord& game);
/// Snapshot after the model's t-th legal move; nullopt when the game is shorter.
std::optional<int> be(const GameRecord& game, int t);
/// Mean of all snapshots; nullopt when there are none.
std::optional<double> be_full(const GameRecord& game);

/// Sample Pearson correlation. Throws MetricsError for mismatched lengths,
/// fewer than two points or zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct GameMetrics {
    std::uint64_t game_id = 0;
    orchestrator::Termination termination = orchestrator::Termination::TransportFailure;
    int moves = 0;  // attempt logs counted
    double imr = 0.0;
    std::optional<double> rblm;
    int gl = 0;
    std::optional<int> be_checkpoint;
    std::optional<double> be_full;
    std::optional<double> mrs;
};

struct Stat {
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 below two values

    static Stat of(const std::vector<double>& values);
};

struct CurvePoint {
    int move = 0;
    int survivors = 0;  // games with an attempt log for this move
    double imr = 0.0;
    std::optional<double> rblm;
    int rblm_games = 0;
    std::optional<double> be;
    int be_games = 0;
};

struct AggregateOptions {
    int be_checkpoint = 20;
    /// Count the unfinished move of an illegal-limit game in IMR/RBLM/MRS
    /// (P = 1, r = 10). Off: only moves with a legal outcome count.
    bool count_terminal_move = true;
};

/// Which records feed which aggregates: transport failures feed none;
/// move-cap games feed IMR/RBLM/MRS but not GL/BE.
struct MetricsSummary {
    std::string variation;
    int games = 0;
    int counted = 0;
    int transport_failures = 0;
    int move_cap = 0;
    int natural = 0;
    Stat imr, rblm, gl, be_checkpoint, be_full, mrs;
    int be_checkpoint_move = 20;
    /// Fraction of GL/BE games that reach the checkpoint.
    double be_coverage = 0.0;
    std::vector<CurvePoint> curves;  // moves 1 .. max GL
    std::vector<GameMetrics> per_game;
};

GameMetrics game_metrics(const GameRecord& game, const AggregateOptions& options = {});

/// Throws MetricsError for an empty input.
MetricsSummary aggregate(const std::vector<GameRecord>& records, const AggregateOptions& options = {});

}  // namespace llmchess::metrics
