#include "llmchess/reporting/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "llmchess/prompt/variation.hpp"

namespace llmchess::reporting {

using metrics::CurvePoint;
using metrics::Stat;

namespace {

int catalog_rank(const std::string& id) {
    int rank = 0;
    for (auto v : prompt::kVariationIds) {
        if (v == id) return rank;
        ++rank;
    }
    return rank;
}

std::optional<double> curve_value(const CurvePoint& p, CurveFamily f) {
    switch (f) {
        case CurveFamily::Imr: return p.survivors > 0 ? std::optional<double>(p.imr) : std::nullopt;
        case CurveFamily::Rblm: return p.rblm;
        case CurveFamily::Be: return p.be;
        case CurveFamily::Survivors: return static_cast<double>(p.survivors);
    }
    return std::nullopt;
}

std::string num(double v) { return fmt::format("{:.6f}", v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string stat_cells(const Stat& s) {
    if (s.count == 0) return ",,0";
    return fmt::format("{},{},{}", num(s.mean), num(s.stddev), s.count);
}

std::string stat_text(const Stat& s, int precision) {
    if (s.count == 0) return "-";
    return fmt::format("{:.{}f} ({:.{}f})", s.mean, precision, s.stddev, precision);
}

std::optional<double> safe_pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 2) return std::nullopt;
    try {
        return metrics::pearson(xs, ys);
    } catch (const metrics::MetricsError&) {
        return std::nullopt;
    }
}

// Tick step of 1, 2 or 5 times a power of ten giving about `target` intervals.
double nice_step(double range, int target) {
    if (range <= 0) return 1.0;
    const double raw = range / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

std::string tick_label(double v, double step) {
    if (step >= 1.0) return fmt::format("{:.0f}", v);
    const int digits = static_cast<int>(std::ceil(-std::log10(step)));
    return fmt::format("{:.{}f}", v, digits);
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ReportError("cannot write " + path.string());
    out << text;
}

}  // namespace

ProbeTally tally_probes(const std::vector<orchestrator::ProbeRecord>& probes) {
    ProbeTally t;
    for (const auto& p : probes) {
        ++t.probes;
        if (!p.failure.empty()) ++t.failures;
        if (p.alignment) ++t.aligned;
        if (p.suggestions_valid) ++t.valid;
    }
    return t;
}

ReportBundle build_report(const std::vector<orchestrator::GameRecord>& records,
                          const std::vector<orchestrator::ProbeRecord>& probes,
                          const metrics::AggregateOptions& options) {
    if (records.empty()) throw ReportError("no game records to report on");
    std::map<std::string, std::vector<orchestrator::GameRecord>> groups;
    for (const auto& r : records) groups[r.variation].push_back(r);
    std::vector<std::string> ids;
    for (const auto& [id, _] : groups) ids.push_back(id);
    std::stable_sort(ids.begin(), ids.end(),
                     [](const std::string& a, const std::string& b) { return catalog_rank(a) < catalog_rank(b); });

    ReportBundle b;
    std::vector<double> var_rblm, var_mrs, game_rblm, game_mrs;
    for (const auto& id : ids) {
        VariationReport v;
        v.summary = metrics::aggregate(groups[id], options);
        v.natural_rate = static_cast<double>(v.summary.natural) / v.summary.games;
        b.max_move = std::max(b.max_move, static_cast<int>(v.summary.curves.size()));
        if (v.summary.rblm.count > 0 && v.summary.mrs.count > 0) {
            var_rblm.push_back(v.summary.rblm.mean);
            var_mrs.push_back(v.summary.mrs.mean);
        }
        for (const auto& g : v.summary.per_game)
            if (g.rblm && g.mrs) {
                game_rblm.push_back(*g.rblm);
                game_mrs.push_back(*g.mrs);
            }
        b.variations.push_back(std::move(v));
    }
    b.rblm_mrs_r = safe_pearson(var_rblm, var_mrs);
    b.rblm_mrs_r_games = safe_pearson(game_rblm, game_mrs);
    if (!probes.empty()) b.probes = tally_probes(probes);
    return b;
}

std::string curve_name(CurveFamily f) {
    switch (f) {
        case CurveFamily::Imr: return "imr";
        case CurveFamily::Rblm: return "rblm";
        case CurveFamily::Be: return "be";
        case CurveFamily::Survivors: return "survivors";
    }
    return "?";
}

std::string curve_title(CurveFamily f) {
    switch (f) {
        case CurveFamily::Imr: return "Average IMR by move";
        case CurveFamily::Rblm: return "Average RBLM by move";
        case CurveFamily::Be: return "Board evaluation by move (cp)";
        case CurveFamily::Survivors: return "Remaining games by move";
    }
    return "?";
}

std::string summary_csv(const ReportBundle& bundle) {
    std::string out =
        "variation,games,counted,natural,natural_rate,move_cap,transport_failures,"
        "imr,imr_sd,imr_n,rblm,rblm_sd,rblm_n,gl,gl_sd,gl_n,be_checkpoint_move,be,be_sd,be_n,be_coverage,"
        "be_full,be_full_sd,be_full_n,mrs,mrs_sd,mrs_n\n";
    for (const auto& v : bundle.variations) {
        const auto& s = v.summary;
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(s.variation), s.games,
                           s.counted, s.natural, num(v.natural_rate), s.move_cap, s.transport_failures,
                           stat_cells(s.imr), stat_cells(s.rblm), stat_cells(s.gl), s.be_checkpoint_move,
                           stat_cells(s.be_checkpoint), num(s.be_coverage), stat_cells(s.be_full),
                           stat_cells(s.mrs));
    }
    return out;
}

std::string summary_table(const ReportBundle& bundle) {
    const int be_move = bundle.variations.empty() ? 20 : bundle.variations.front().summary.be_checkpoint_move;
    std::string out = fmt::format("{:<14} {:>6} {:>15} {:>15} {:>15} {:>17} {:>17} {:>15} {:>8}\n", "Variation",
                                  "Games", "IMR", "RBLM", "GL", fmt::format("BE{}", be_move), "BE full", "MRS",
                                  "Natural");
    for (const auto& v : bundle.variations) {
        const auto& s = v.summary;
        out += fmt::format("{:<14} {:>6} {:>15} {:>15} {:>15} {:>17} {:>17} {:>15} {:>8}\n", s.variation, s.games,
                           stat_text(s.imr, 2), stat_text(s.rblm, 2), stat_text(s.gl, 2),
                           stat_text(s.be_checkpoint, 1), stat_text(s.be_full, 1), stat_text(s.mrs, 2),
                           fmt::format("{:.2f}%", 100.0 * v.natural_rate));
    }
    out += "Values are mean (sample standard deviation).\n";
    for (const auto& v : bundle.variations) {
        const auto& s = v.summary;
        out += fmt::format("{}: {} of {} games counted ({} move cap, {} transport failures); {:.1f}% reach move {}\n",
                           s.variation, s.counted, s.games, s.move_cap, s.transport_failures,
                           100.0 * s.be_coverage, s.be_checkpoint_move);
    }

    const auto& ref = kPublishedBaseline;
    out += "\nPublished baseline (gpt-3.5-turbo-0301) next to this run:\n";
    out += fmt::format("{:<22} {:>8} {:>8} {:>8} {:>8}\n", "", "IMR", "RBLM", "GL", "BE");
    out += fmt::format("{:<22} {:>8.2f} {:>8.2f} {:>8.2f} {:>8.1f}\n", "published", ref.imr, ref.rblm, ref.gl, ref.be);
    for (const auto& v : bundle.variations) {
        if (v.summary.variation != "Baseline") continue;
        const auto& s = v.summary;
        auto cell = [](const Stat& st, int p) { return st.count ? fmt::format("{:.{}f}", st.mean, p) : "-"; };
        out += fmt::format("{:<22} {:>8} {:>8} {:>8} {:>8}\n", "this run", cell(s.imr, 2), cell(s.rblm, 2),
                           cell(s.gl, 2), cell(s.be_checkpoint, 1));
    }
    out += fmt::format("RBLM/MRS correlation across variations: published {:.2f}, this run {}\n", ref.rblm_mrs_r,
                       bundle.rblm_mrs_r ? fmt::format("{:.2f}", *bundle.rblm_mrs_r) : "-");
    if (bundle.rblm_mrs_r_games)
        out += fmt::format("RBLM/MRS correlation across games: {:.2f}\n", *bundle.rblm_mrs_r_games);
    if (bundle.probes) {
        const auto& p = *bundle.probes;
        out += fmt::format("\nProbe: {} positions, {} aligned, {} with valid suggestions, {} failed requests "
                           "(published: {} games, {} aligned, {} valid)\n",
                           p.probes, p.aligned, p.valid, p.failures, ref.probe_games, ref.probe_aligned,
                           ref.probe_valid);
    }
    return out;
}

std::string curve_csv(const ReportBundle& bundle, CurveFamily family) {
    std::string out = "move";
    for (const auto& v : bundle.variations) out += "," + csv_field(v.summary.variation);
    out += '\n';
    for (int t = 1; t <= bundle.max_move; ++t) {
        out += std::to_string(t);
        for (const auto& v : bundle.variations) {
            out += ',';
            const auto& c = v.summary.curves;
            if (t > static_cast<int>(c.size())) continue;
            const auto val = curve_value(c[t - 1], family);
            if (!val) continue;
            out += family == CurveFamily::Survivors ? std::to_string(c[t - 1].survivors) : num(*val);
        }
        out += '\n';
    }
    return out;
}

std::string curve_svg(const ReportBundle& bundle, CurveFamily family) {
    constexpr double W = 720, H = 420, L = 70, R = 170, T = 40, B = 55;
    const double pw = W - L - R, ph = H - T - B;

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& v : bundle.variations)
        for (const auto& p : v.summary.curves)
            if (auto val = curve_value(p, family)) {
                lo = std::min(lo, *val);
                hi = std::max(hi, *val);
                any = true;
            }
    if (!any || hi == lo) hi = lo + 1.0;
    const double ystep = nice_step(hi - lo, 5);
    const double ymin = std::floor(lo / ystep) * ystep, ymax = std::ceil(hi / ystep) * ystep;
    const int xmax = std::max(bundle.max_move, 2);
    const double xstep = nice_step(xmax - 1, 8);

    auto X = [&](double m) { return L + (m - 1.0) / (xmax - 1.0) * pw; };
    auto Y = [&](double v) { return T + (ymax - v) / (ymax - ymin) * ph; };

    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} "
        "{1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n",
        W, H);
    s += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", W, H);
    s += fmt::format("<text x=\"{:.2f}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", L + pw / 2,
                     curve_title(family));

    const int yticks = static_cast<int>(std::lround((ymax - ymin) / ystep));
    for (int i = 0; i <= yticks; ++i) {
        const double v = ymin + i * ystep;
        s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#dddddd\"/>\n", L,
                         Y(v), L + pw, Y(v));
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", L - 6, Y(v) + 4,
                         tick_label(v, ystep));
    }
    for (double m = 1.0; m <= xmax + 1e-9; m += xstep) {
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#000000\"/>\n",
                         X(m), T + ph, T + ph + 4);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:.0f}</text>\n", X(m), T + ph + 18,
                         m);
    }
    s += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                     "stroke=\"#000000\"/>\n",
                     L, T, pw, ph);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">Move</text>\n", L + pw / 2, H - 12);

    int k = 0;
    for (const auto& v : bundle.variations) {
        const char* color = kPalette[k % std::size(kPalette)];
        std::string points;
        auto flush = [&] {
            if (!points.empty())
                s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
                                 points);
            points.clear();
        };
        for (const auto& p : v.summary.curves) {
            const auto val = curve_value(p, family);
            if (!val) {
                flush();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += fmt::format("{:.2f},{:.2f}", X(p.move), Y(*val));
        }
        flush();
        const double ly = T + 10 + 18 * k;
        s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                         "stroke-width=\"2\"/>\n",
                         L + pw + 12, ly, L + pw + 32, ly, color);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", L + pw + 38, ly + 4, v.summary.variation);
        ++k;
    }
    s += "</svg>\n";
    return s;
}

std::string probes_csv(const std::vector<orchestrator::ProbeRecord>& probes) {
    std::string out = "game_id,fraction,original_plies,truncated_plies,fen,next_move,suggestions,engine_top,"
                      "alignment,suggestions_valid,failure,response,insight\n";
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
        return s;
    };
    for (const auto& p : probes)
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},\n", p.game_id, num(p.fraction), p.original_plies,
                           p.truncated_plies, csv_field(p.fen), csv_field(p.next_move),
                           csv_field(join(p.suggestions)), csv_field(join(p.engine_top)), p.alignment ? 1 : 0,
                           p.suggestions_valid ? 1 : 0, csv_field(p.failure), csv_field(p.response));
    return out;
}

std::vector<std::filesystem::path> write_report(const ReportBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "curves");
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& p, const std::string& text) {
        write_file(p, text);
        written.push_back(p);
    };
    put(dir / "summary.csv", summary_csv(bundle));
    put(dir / "summary.txt", summary_table(bundle));
    for (CurveFamily f : kCurveFamilies) {
        put(dir / "curves" / (curve_name(f) + ".csv"), curve_csv(bundle, f));
        put(dir / "curves" / (curve_name(f) + ".svg"), curve_svg(bundle, f));
    }
    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace llmchess::reporting
