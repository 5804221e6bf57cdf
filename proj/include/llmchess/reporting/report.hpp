#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "llmchess/metrics/metrics.hpp"
#include "llmchess/orchestrator/records.hpp"

namespace llmchess::reporting {

class ReportError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Published values for the baseline variation with gpt-3.5-turbo-0301,
/// reprinted next to harness output. The correlation is between per-variation
/// RBLM and MRS means.
struct ReferenceValues {
    double imr = 0.26;
    double rblm = 6.78;
    double gl = 18.79;
    double be = 253.1;
    double rblm_mrs_r = -0.86;
    int probe_games = 50;
    int probe_aligned = 9;
    int probe_valid = 39;
};
inline constexpr ReferenceValues kPublishedBaseline{};

struct ProbeTally {
    int probes = 0;
    int aligned = 0;
    int valid = 0;
    int failures = 0;
};

ProbeTally tally_probes(const std::vector<orchestrator::ProbeRecord>& probes);

struct VariationReport {
    metrics::MetricsSummary summary;
    /// Games ended by the rules of chess over all games of the variation.
    double natural_rate = 0.0;
};

struct ReportBundle {
    std::vector<VariationReport> variations;  // catalog order, then by id
    std::optional<ProbeTally> probes;
    /// Pearson r of per-variation RBLM against MRS; needs two or more
    /// variations with both defined and not constant.
    std::optional<double> rblm_mrs_r;
    /// The same over the games of each variation pooled together.
    std::optional<double> rblm_mrs_r_games;
    int max_move = 0;  // max GL over all counted records
};

/// Groups records by variation and aggregates each group. Throws
/// ReportError for an empty input.
ReportBundle build_report(const std::vector<orchestrator::GameRecord>& records,
                          const std::vector<orchestrator::ProbeRecord>& probes = {},
                          const metrics::AggregateOptions& options = {});

/// Curve families, one CSV and one SVG each.
enum class CurveFamily { Imr, Rblm, Be, Survivors };
inline constexpr CurveFamily kCurveFamilies[] = {CurveFamily::Imr, CurveFamily::Rblm, CurveFamily::Be,
                                                 CurveFamily::Survivors};
std::string curve_name(CurveFamily f);   // "imr", "rblm", "be", "survivors"
std::string curve_title(CurveFamily f);  // axis label

std::string summary_csv(const ReportBundle& bundle);
/// Fixed-width table for terminals: one row per variation, then the
/// published reference row and the probe tallies when present.
std::string summary_table(const ReportBundle& bundle);
/// Rows 1..max_move; one column per variation, empty cells where a value
/// is undefined or the variation has no games that long.
std::string curve_csv(const ReportBundle& bundle, CurveFamily family);
std::string curve_svg(const ReportBundle& bundle, CurveFamily family);
/// One row per probe with the response text and an empty insight column
/// for manual annotation.
std::string probes_csv(const std::vector<orchestrator::ProbeRecord>& probes);

/// Writes summary.csv, summary.txt and curves/<family>.{csv,svg}; returns
/// the paths written, sorted.
std::vector<std::filesystem::path> write_report(const ReportBundle& bundle, const std::filesystem::path& dir);

}  // namespace llmchess::reporting
