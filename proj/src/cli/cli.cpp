#include "llmchess/cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "llmchess/orchestrator/audit.hpp"
#include "llmchess/orchestrator/experiment.hpp"
#include "llmchess/orchestrator/probe.hpp"
#include "llmchess/prompt/variation.hpp"
#include "llmchess/reporting/pgn.hpp"
#include "llmchess/reporting/report.hpp"
#include "llmchess/reporting/store.hpp"

namespace llmchess::cli {

namespace fs = std::filesystem;
using orchestrator::GameRecord;
using orchestrator::Manifest;

namespace {

// Configuration mistakes the user can fix; reported with exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Overrides {
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::optional<int> parallelism;
    std::optional<int> games;
    std::string adapter;
    std::string mock_script;
    std::string engine;
};

void add_overrides(CLI::App* cmd, Overrides& o, bool manifest_required) {
    auto* m = cmd->add_option("--manifest", o.manifest, "Experiment manifest (JSON)");
    if (manifest_required) m->required();
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--parallelism", o.parallelism, "Concurrent games")->check(CLI::PositiveNumber);
    cmd->add_option("--games", o.games, "Number of games")->check(CLI::PositiveNumber);
    cmd->add_option("--adapter", o.adapter, "Chat backend")->check(CLI::IsMember({"live", "mock"}));
    cmd->add_option("--mock-script", o.mock_script, "Scripted replies: a JSONL file or a directory of game-<id>.jsonl");
    cmd->add_option("--engine", o.engine, "UCI engine executable, or builtin:material");
}

Manifest load_manifest(const Overrides& o) {
    Manifest m;
    if (!o.manifest.empty()) m = Manifest::load(o.manifest);
    if (o.seed) m.seed = *o.seed;
    if (o.parallelism) m.parallelism = *o.parallelism;
    if (o.games) m.games = *o.games;
    if (!o.adapter.empty()) m.adapter.kind = orchestrator::adapter_kind_from_name(o.adapter);
    if (!o.mock_script.empty()) {
        m.adapter.kind = orchestrator::AdapterSpec::Kind::Mock;
        m.adapter.mock_script = fs::absolute(o.mock_script);
    }
    if (!o.engine.empty()) m.engine.path = o.engine;
    m.validate();
    return m;
}

fs::path games_path(const fs::path& in) { return fs::is_directory(in) ? in / reporting::kGamesFile : in; }

fs::path sibling(const fs::path& games, const char* name) { return games.parent_path() / name; }

std::vector<GameRecord> load_games(const fs::path& in) {
    const fs::path p = games_path(in);
    if (!fs::exists(p)) throw UsageError("no game log at " + p.string());
    auto records = reporting::read_games(p);
    if (records.empty()) throw UsageError("game log " + p.string() + " is empty");
    return records;
}

std::string message_header(const nlohmann::json& m) {
    std::string h = m.at("role").get<std::string>();
    if (m.contains("annotation") && !m.at("annotation").is_null()) h += " (" + m.at("annotation").get<std::string>() + ")";
    return h;
}

int cmd_run(const Overrides& o, const std::string& out_dir, bool quiet, std::ostream& out, std::ostream& err) {
    Manifest m = load_manifest(o);
    const fs::path dir = out_dir;
    fs::create_directories(dir);
    reporting::write_manifest(dir / reporting::kManifestFile, m);

    std::mutex mu;
    int done = 0;
    orchestrator::RunOptions opts;
    opts.raw_dir = dir / "raw";
    if (!quiet)
        opts.progress = [&](const GameRecord& g) {
            std::lock_guard lock(mu);
            err << fmt::format("[{}/{}] game {}: {} after {} moves\n", ++done, m.games, g.game_id,
                               orchestrator::termination_name(g.termination), g.n());
        };
    std::vector<GameRecord> records;
    {
        reporting::RunStore store(dir);
        opts.sink = &store;
        records = orchestrator::run_experiment(m, opts);
    }
    const auto bundle = reporting::build_report(records);
    reporting::write_report(bundle, dir / "report");
    out << reporting::summary_table(bundle);
    out << fmt::format("Wrote {} games to {}\n", records.size(), (dir / reporting::kGamesFile).string());
    return kExitOk;
}

int cmd_report(const std::string& in, const std::string& probes_in, const std::string& out_dir, int checkpoint,
               bool exclude_terminal, std::ostream& out) {
    const auto records = load_games(in);
    std::vector<orchestrator::ProbeRecord> probes;
    fs::path probe_path = probes_in;
    if (probe_path.empty() && fs::exists(sibling(games_path(in), reporting::kProbesFile)))
        probe_path = sibling(games_path(in), reporting::kProbesFile);
    if (!probe_path.empty()) probes = reporting::read_probes(probe_path);

    metrics::AggregateOptions options;
    options.be_checkpoint = checkpoint;
    options.count_terminal_move = !exclude_terminal;
    const auto bundle = reporting::build_report(records, probes, options);
    const fs::path dir = out_dir.empty() ? games_path(in).parent_path() / "report" : fs::path(out_dir);
    for (const auto& p : reporting::write_report(bundle, dir)) out << p.string() << '\n';
    out << reporting::summary_table(bundle);
    return kExitOk;
}

int cmd_probe(const Overrides& o, const std::string& in, const std::string& out_dir, int sample, std::ostream& out) {
    const auto records = load_games(in);
    Manifest m = load_manifest(o);
    orchestrator::ProbeSettings settings;
    settings.sample = sample;
    settings.seed = m.seed;
    settings.sampling = m.adapter.sampling;
    settings.retry = m.adapter.retry;

    std::string engine_name;
    auto engine = orchestrator::start_engine(m.engine, &engine_name);
    auto feed = std::make_shared<orchestrator::PositionFeed>();
    std::shared_ptr<chat::RateLimiter> limiter;
    if (m.adapter.kind == orchestrator::AdapterSpec::Kind::Live)
        limiter = std::make_shared<chat::RateLimiter>(m.adapter.live.requests_per_minute);
    auto adapters = [&](const orchestrator::ProbeCut& cut) {
        return orchestrator::make_backends(m, cut.game_id, orchestrator::game_seed(m.seed, cut.game_id), feed, limiter)
            .player;
    };
    const fs::path dir = out_dir.empty() ? games_path(in).parent_path() : fs::path(out_dir);
    fs::create_directories(dir);
    auto log = std::make_shared<chat::RawLog>(dir / "probe-raw.jsonl");
    const auto probes = orchestrator::run_probe(records, settings, *engine, adapters, feed, log);
    reporting::write_probes(dir / reporting::kProbesFile, probes);
    std::ofstream(dir / "probes.csv", std::ios::binary) << reporting::probes_csv(probes);
    const auto t = reporting::tally_probes(probes);
    out << fmt::format("{} probes: {} aligned, {} with valid suggestions, {} failed requests\n", t.probes, t.aligned,
                       t.valid, t.failures);
    out << fmt::format("Wrote {}\n", (dir / reporting::kProbesFile).string());
    return kExitOk;
}

int cmd_replay(const std::string& in, std::uint64_t game_id, const std::string& transcripts_in,
               const std::string& out_dir, std::ostream& out) {
    const auto records = load_games(in);
    const auto it = std::find_if(records.begin(), records.end(), [&](const GameRecord& g) { return g.game_id == game_id; });
    if (it == records.end()) throw UsageError(fmt::format("no game {} in the log", game_id));
    const std::string pgn = reporting::export_pgn(*it);
    out << pgn << '\n';

    for (const auto& log : it->moves) {
        out << fmt::format("Move {}:", log.index);
        for (const auto& a : log.attempts)
            out << fmt::format(" {} [{}]", a.candidate.value_or("\"" + a.raw + "\""), chess::verdict_name(a.verdict));
        out << '\n';
    }

    const fs::path tpath =
        transcripts_in.empty() ? sibling(games_path(in), reporting::kTranscriptsFile) : fs::path(transcripts_in);
    std::string transcript;
    if (fs::exists(tpath)) {
        if (auto t = reporting::find_transcript(tpath, game_id)) {
            for (const auto& msg : t->at("messages"))
                transcript += fmt::format("--- {} ---\n{}\n", message_header(msg), msg.at("content").get<std::string>());
            for (const auto& r : t->at("rejected"))
                transcript += fmt::format("--- rejected reply (slot {}) ---\n{}\n", r.at("slot").get<int>(),
                                          r.at("content").get<std::string>());
        }
    }
    if (transcript.empty())
        out << "(no transcript stored for this game)\n";
    else
        out << '\n' << transcript;

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream(fs::path(out_dir) / fmt::format("game-{}.pgn", game_id), std::ios::binary) << pgn;
        std::ofstream(fs::path(out_dir) / fmt::format("game-{}.txt", game_id), std::ios::binary) << transcript;
    }
    return kExitOk;
}

int cmd_validate(const std::string& in, std::ostream& out) {
    const auto records = load_games(in);
    const auto report = orchestrator::audit(records);
    for (const auto& issue : report.issues)
        out << fmt::format("game {} move {} attempt {}: {}\n", issue.game_id, issue.move, issue.attempt, issue.what);
    out << fmt::format("{} games, {} attempts re-judged, {} verdict mismatches, {} issues\n", report.games,
                       report.attempts, report.verdict_mismatches, report.issues.size());
    return report.ok() ? kExitOk : kExitFailure;
}

int cmd_catalog(std::ostream& out) {
    for (const auto& v : prompt::builtin_catalog())
        out << fmt::format("{:<12} reasoning={:<6} extraction={:<12} regeneration={:<15} {}\n", v.id,
                           prompt::reasoning_name(v.reasoning), prompt::extraction_name(v.extraction),
                           prompt::regeneration_name(v.regeneration), prompt::config_hash(v).substr(0, 12));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Plays chess between a chat model and a UCI engine and measures move legality."};
    app.name("llmchess");
    app.require_subcommand(1);

    Overrides run_o, probe_o;
    std::string out_dir, in, probes_in, transcripts_in;
    bool quiet = false, exclude_terminal = false;
    int checkpoint = 20, sample = 20;
    std::uint64_t game_id = 0;

    auto* run_cmd = app.add_subcommand("run", "Play the games of a manifest");
    add_overrides(run_cmd, run_o, true);
    run_cmd->add_option("--out", out_dir, "Output directory")->required();
    run_cmd->add_flag("--quiet", quiet, "No per-game progress");

    auto* report_cmd = app.add_subcommand("report", "Summary table, curve CSVs and SVGs from a game log");
    report_cmd->add_option("--in", in, "games.jsonl or a run directory")->required();
    report_cmd->add_option("--probes", probes_in, "probes.jsonl to tally");
    report_cmd->add_option("--out", out_dir, "Report directory (default: <run>/report)");
    report_cmd->add_option("--be-checkpoint", checkpoint, "Model move for the BE column")->check(CLI::PositiveNumber);
    report_cmd->add_flag("--exclude-terminal-move", exclude_terminal,
                         "Leave the unfinished move of illegal-limit games out of IMR/RBLM/MRS");

    auto* probe_cmd = app.add_subcommand("probe", "Ask for the best move in positions cut from recorded games");
    probe_cmd->add_option("--in", in, "games.jsonl or a run directory")->required();
    add_overrides(probe_cmd, probe_o, false);
    probe_cmd->add_option("--out", out_dir, "Output directory (default: next to the log)");
    probe_cmd->add_option("--sample", sample, "Games to probe")->check(CLI::PositiveNumber);

    auto* replay_cmd = app.add_subcommand("replay", "PGN and annotated transcript of one game");
    replay_cmd->add_option("--in", in, "games.jsonl or a run directory")->required();
    replay_cmd->add_option("--game", game_id, "Game id")->required();
    replay_cmd->add_option("--transcripts", transcripts_in, "transcripts.jsonl (default: next to the log)");
    replay_cmd->add_option("--out", out_dir, "Also write game-<id>.pgn and game-<id>.txt here");

    auto* validate_cmd = app.add_subcommand("validate", "Re-judge every recorded attempt against the replayed game");
    validate_cmd->add_option("--in", in, "games.jsonl or a run directory")->required();

    auto* catalog_cmd = app.add_subcommand("catalog", "List the built-in prompt variations");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run_o, out_dir, quiet, out, err);
        if (*report_cmd) return cmd_report(in, probes_in, out_dir, checkpoint, exclude_terminal, out);
        if (*probe_cmd) return cmd_probe(probe_o, in, out_dir, sample, out);
        if (*replay_cmd) return cmd_replay(in, game_id, transcripts_in, out_dir, out);
        if (*validate_cmd) return cmd_validate(in, out);
        if (*catalog_cmd) return cmd_catalog(out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const orchestrator::ManifestError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const prompt::VariationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace llmchess::cli
