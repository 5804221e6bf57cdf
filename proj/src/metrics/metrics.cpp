#include "llmchess/metrics/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "llmchess/chess/san.hpp"

namespace llmchess::metrics {

using orchestrator::Termination;

namespace {

void check_t(const GameRecord& game, int t) {
    if (t < 1 || t > moves_available(game))
        throw MetricsError(fmt::format("move index {} outside 1..{} for game {}", t, moves_available(game),
                                       game.game_id));
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

int counted_moves(const GameRecord& g, const AggregateOptions& o) {
    return o.count_terminal_move ? moves_available(g) : g.n();
}

IllegalAttemptProfile profile_upto(const GameRecord& game, int moves) {
    IllegalAttemptProfile p;
    for (int i = 0; i < moves; ++i) {
        const auto& log = game.moves[i];
        IllegalAttemptProfile::Move m;
        m.index = log.index;
        for (const auto& a : log.attempts) {
            if (a.legal()) continue;
            ++m.attempts;
            ++m.counts[attempt_identity(a)];
        }
        if (m.attempts > 0) p.moves.push_back(std::move(m));
    }
    return p;
}

}  // namespace

std::string attempt_identity(const orchestrator::Attempt& a) {
    if (a.candidate) return chess::normalize_san(*a.candidate);
    std::string out = "text:";
    bool space = false;
    for (char c : a.raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && out.size() > 5) out += ' ';
        space = false;
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

IllegalAttemptProfile illegal_profile(const GameRecord& game) { return profile_upto(game, moves_available(game)); }

int moves_available(const GameRecord& game) noexcept { return static_cast<int>(game.moves.size()); }

double imr(const GameRecord& game, int t) {
    check_t(game, t);
    int offending = 0;
    for (int j = 0; j < t; ++j) offending += game.moves[j].p();
    return static_cast<double>(offending) / t;
}

std::optional<double> rblm(const GameRecord& game, int t) {
    check_t(game, t);
    int r = 0, p = 0;
    for (int j = 0; j < t; ++j) {
        r += game.moves[j].r();
        p += game.moves[j].p();
    }
    if (p == 0) return std::nullopt;
    return static_cast<double>(r) / p;
}

std::optional<double> mrs(const IllegalAttemptProfile& profile) {
    if (profile.moves.empty()) return std::nullopt;
    double total = 0.0;
    for (const auto& m : profile.moves) {
        double s = 0.0;
        for (const auto& [text, c] : m.counts) {
            const double share = static_cast<double>(c) / m.attempts;
            s += share * share;
        }
        total += s;
    }
    return total / static_cast<double>(profile.moves.size());
}

std::optional<double> mrs(const GameRecord& game) { return mrs(illegal_profile(game)); }

std::optional<int> be(const GameRecord& game, int t) {
    if (t < 1) throw MetricsError("checkpoint move must be >= 1");
    if (static_cast<int>(game.evaluations.size()) < t) return std::nullopt;
    return game.evaluations[t - 1];
}

std::optional<double> be_full(const GameRecord& game) {
    if (game.evaluations.empty()) return std::nullopt;
    double s = 0.0;
    for (int e : game.evaluations) s += e;
    return s / static_cast<double>(game.evaluations.size());
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw MetricsError("pearson needs equally long inputs");
    if (xs.size() < 2) throw MetricsError("pearson needs at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw MetricsError("pearson is undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

Stat Stat::of(const std::vector<double>& values) {
    Stat s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = mean_of(values);
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

GameMetrics game_metrics(const GameRecord& game, const AggregateOptions& options) {
    GameMetrics m;
    m.game_id = game.game_id;
    m.termination = game.termination;
    m.moves = counted_moves(game, options);
    m.gl = game.n();
    if (m.moves > 0) {
        m.imr = imr(game, m.moves);
        m.rblm = rblm(game, m.moves);
    }
    m.mrs = mrs(profile_upto(game, m.moves));
    m.be_checkpoint = be(game, options.be_checkpoint);
    m.be_full = be_full(game);
    return m;
}

MetricsSummary aggregate(const std::vector<GameRecord>& records, const AggregateOptions& options) {
    if (records.empty()) throw MetricsError("no records to aggregate");
    MetricsSummary s;
    s.variation = records.front().variation;
    s.games = static_cast<int>(records.size());
    s.be_checkpoint_move = options.be_checkpoint;

    std::vector<double> imrs, rblms, gls, bes, be_fulls, mrss;
    std::vector<const GameRecord*> counted, length_games;
    int reach = 0;
    for (const auto& g : records) {
        if (g.termination == Termination::TransportFailure) {
            ++s.transport_failures;
            continue;
        }
        if (orchestrator::is_natural(g.termination)) ++s.natural;
        const GameMetrics m = game_metrics(g, options);
        s.per_game.push_back(m);
        counted.push_back(&g);
        if (m.moves > 0) imrs.push_back(m.imr);
        if (m.rblm) rblms.push_back(*m.rblm);
        if (m.mrs) mrss.push_back(*m.mrs);
        if (g.termination == Termination::MoveCap) {
            ++s.move_cap;
            continue;
        }
        length_games.push_back(&g);
        gls.push_back(m.gl);
        if (m.be_checkpoint) {
            bes.push_back(*m.be_checkpoint);
            ++reach;
        }
        if (m.be_full) be_fulls.push_back(*m.be_full);
    }
    s.counted = static_cast<int>(counted.size());
    s.imr = Stat::of(imrs);
    s.rblm = Stat::of(rblms);
    s.gl = Stat::of(gls);
    s.be_checkpoint = Stat::of(bes);
    s.be_full = Stat::of(be_fulls);
    s.mrs = Stat::of(mrss);
    s.be_coverage = length_games.empty() ? 0.0 : static_cast<double>(reach) / length_games.size();

    int max_gl = 0;
    for (const auto* g : counted) max_gl = std::max(max_gl, g->n());
    for (int t = 1; t <= max_gl; ++t) {
        CurvePoint p;
        p.move = t;
        std::vector<double> im, rb, ev;
        for (const auto* g : counted) {
            if (counted_moves(*g, options) < t) continue;
            ++p.survivors;
            im.push_back(imr(*g, t));
            if (auto r = rblm(*g, t)) rb.push_back(*r);
        }
        for (const auto* g : length_games)
            if (auto e = be(*g, t)) ev.push_back(*e);
        p.imr = im.empty() ? 0.0 : mean_of(im);
        p.rblm_games = static_cast<int>(rb.size());
        if (!rb.empty()) p.rblm = mean_of(rb);
        p.be_games = static_cast<int>(ev.size());
        if (!ev.empty()) p.be = mean_of(ev);
        s.curves.push_back(p);
    }
    return s;
}

}  // namespace llmchess::metrics
