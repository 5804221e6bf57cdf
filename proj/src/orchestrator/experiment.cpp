#include "llmchess/orchestrator/experiment.hpp"

#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "llmchess/chat/scripted.hpp"
#include "llmchess/engine/material.hpp"

namespace llmchess::orchestrator {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::filesystem::path& p) {
    if (p.is_absolute() || base.empty()) return p;
    return base / p;
}

prompt::VariationConfig variation_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
    if (j.is_string()) return prompt::builtin_variation(j.get<std::string>());
    if (j.is_object() && j.contains("file") && j.size() == 1)
        return prompt::load_variation(resolve(base, j.at("file").get<std::string>()).string());
    auto c = j.get<prompt::VariationConfig>();
    c.validate();
    return c;
}

Manifest manifest_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
    Manifest m;
    m.version = j.value("version", kManifestVersion);
    if (m.version != kManifestVersion)
        throw ManifestError(fmt::format("manifest version {} is not supported (expected {})", m.version,
                                        kManifestVersion));
    if (j.contains("variation")) m.variation = variation_from_json(j.at("variation"), base);
    if (j.contains("engine")) m.engine = j.at("engine").get<engine::EngineConfig>();
    if (j.contains("adapter")) m.adapter = j.at("adapter").get<AdapterSpec>();
    if (m.adapter.mock_script) m.adapter.mock_script = resolve(base, *m.adapter.mock_script);
    m.seed = j.value("seed", m.seed);
    m.games = j.value("games", m.games);
    m.parallelism = j.value("parallelism", m.parallelism);
    m.move_cap = j.value("move_cap", m.move_cap);
    m.created_at = j.value("created_at", "");
    m.validate();
    return m;
}

std::filesystem::path script_for_game(const std::filesystem::path& script, std::uint64_t game_id) {
    if (!std::filesystem::is_directory(script)) return script;
    const auto own = script / fmt::format("game-{}.jsonl", game_id);
    if (std::filesystem::exists(own)) return own;
    const auto fallback = script / "default.jsonl";
    if (std::filesystem::exists(fallback)) return fallback;
    throw ManifestError(fmt::format("no script for game {} in {}", game_id, script.string()));
}

}  // namespace

std::string_view adapter_kind_name(AdapterSpec::Kind k) noexcept { return k == AdapterSpec::Kind::Mock ? "mock" : "live"; }

AdapterSpec::Kind adapter_kind_from_name(std::string_view name) {
    if (name == "mock") return AdapterSpec::Kind::Mock;
    if (name == "live") return AdapterSpec::Kind::Live;
    throw ManifestError(fmt::format("unknown adapter kind '{}'", name));
}

void Manifest::validate() const {
    if (games < 1) throw ManifestError("game count must be >= 1");
    if (parallelism < 1) throw ManifestError("parallelism must be >= 1");
    if (move_cap < 1) throw ManifestError("move cap must be >= 1");
    variation.validate();
    if (engine.path != kBuiltinEngine) engine.validate();
    if (adapter.kind == AdapterSpec::Kind::Mock && !adapter.mock_script) {
        if (adapter.synthetic.profiles.empty()) throw ManifestError("synthetic population is empty");
        for (const auto& p : adapter.synthetic.profiles) p.validate();
    }
    adapter.sampling.validate();
}

Manifest Manifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
    }
    try {
        return manifest_from_json(j, path.parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
    } catch (const std::invalid_argument& e) {
        throw ManifestError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void to_json(nlohmann::json& j, const AdapterSpec& a) {
    j = nlohmann::json{{"kind", adapter_kind_name(a.kind)}, {"sampling", a.sampling}, {"retry", a.retry}};
    if (a.kind == AdapterSpec::Kind::Mock) {
        if (a.mock_script)
            j["mock_script"] = a.mock_script->string();
        else
            j["synthetic"] = a.synthetic;
    } else {
        j["live"] = a.live;
    }
}

void from_json(const nlohmann::json& j, AdapterSpec& a) {
    a = AdapterSpec{};
    a.kind = adapter_kind_from_name(j.value("kind", std::string("mock")));
    if (j.contains("sampling")) a.sampling = j.at("sampling").get<chat::SamplingParams>();
    if (j.contains("retry")) a.retry = j.at("retry").get<chat::RetryPolicy>();
    if (j.contains("mock_script")) a.mock_script = j.at("mock_script").get<std::string>();
    if (j.contains("synthetic")) a.synthetic = j.at("synthetic").get<SyntheticPopulation>();
    if (j.contains("live")) a.live = j.at("live").get<chat::LiveConfig>();
}

void to_json(nlohmann::json& j, const Manifest& m) {
    j = nlohmann::json{{"version", m.version},
                       {"variation", m.variation},
                       {"config_hash", prompt::config_hash(m.variation)},
                       {"fixtures", prompt::fixture_hashes()},
                       {"engine", m.engine},
                       {"adapter", m.adapter},
                       {"seed", m.seed},
                       {"games", m.games},
                       {"parallelism", m.parallelism},
                       {"move_cap", m.move_cap}};
    if (!m.created_at.empty()) j["created_at"] = m.created_at;
}

void from_json(const nlohmann::json& j, Manifest& m) { m = manifest_from_json(j, {}); }

std::unique_ptr<engine::Engine> start_engine(const engine::EngineConfig& config, std::string* name) {
    if (config.path == kBuiltinEngine) {
        if (name) *name = std::string(kBuiltinEngine);
        return std::make_unique<engine::MaterialEngine>();
    }
    auto uci = engine::UciEngine::start(config);
    if (name) *name = uci->name();
    return uci;
}

Backends make_backends(const Manifest& manifest, std::uint64_t game_id, std::uint64_t seed,
                       const std::shared_ptr<PositionFeed>& feed, std::shared_ptr<chat::RateLimiter> limiter) {
    const AdapterSpec& a = manifest.adapter;
    Backends b;
    if (a.kind == AdapterSpec::Kind::Live) {
        if (!limiter) limiter = std::make_shared<chat::RateLimiter>(a.live.requests_per_minute);
        b.player = std::make_unique<chat::LiveAdapter>(a.live, limiter);
        b.extractor = [live = a.live, limiter] { return std::make_unique<chat::LiveAdapter>(live, limiter); };
        return b;
    }
    if (a.mock_script) {
        auto script = std::make_shared<chat::Script>(chat::Script::load(script_for_game(*a.mock_script, game_id)));
        b.player = std::make_unique<chat::ScriptedAdapter>(std::move(script));
    } else {
        b.player = std::make_unique<SyntheticPlayer>(a.synthetic.for_game(game_id), seed, feed);
    }
    b.extractor = [] { return std::make_unique<FaithfulExtractor>(); };
    return b;
}

std::vector<GameRecord> run_experiment(const Manifest& manifest, const RunOptions& options) {
    manifest.validate();
    GameSettings settings;
    settings.variation = manifest.variation;
    settings.config_hash = prompt::config_hash(manifest.variation);
    settings.sampling = manifest.adapter.sampling;
    settings.retry = manifest.adapter.retry;
    settings.move_cap = manifest.move_cap;

    if (!options.raw_dir.empty()) std::filesystem::create_directories(options.raw_dir);
    std::shared_ptr<chat::RateLimiter> limiter;
    if (manifest.adapter.kind == AdapterSpec::Kind::Live)
        limiter = std::make_shared<chat::RateLimiter>(manifest.adapter.live.requests_per_minute);

    const auto total = static_cast<std::uint64_t>(manifest.games);
    std::vector<GameRecord> records(total);
    std::atomic<std::uint64_t> next_id{1};
    std::atomic<bool> stop{false};
    std::mutex mu;
    std::exception_ptr error;
    std::map<std::uint64_t, GameOutput> pending;  // finished games waiting for their turn at the sink
    std::uint64_t next_write = 1;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t id = next_id.fetch_add(1);
            if (id > total || stop.load()) return;
            try {
                const std::uint64_t seed = game_seed(manifest.seed, id);
                std::shared_ptr<chat::RawLog> log;
                if (!options.raw_dir.empty())
                    log = std::make_shared<chat::RawLog>(options.raw_dir / fmt::format("game-{}.jsonl", id));
                auto feed = std::make_shared<PositionFeed>();
                std::string engine_name;
                auto engine = start_engine(manifest.engine, &engine_name);
                auto backends = make_backends(manifest, id, seed, feed, limiter);

                GameResources res;
                res.engine = engine.get();
                res.engine_name = engine_name;
                res.player = std::move(backends.player);
                res.extractor = std::move(backends.extractor);
                res.log = log;
                res.feed = feed;
                GameOutput out = play_game(settings, std::move(res), id, seed);
                if (options.progress) options.progress(out.record);

                std::lock_guard lock(mu);
                records[id - 1] = out.record;
                if (options.sink) {
                    pending.emplace(id, std::move(out));
                    while (!pending.empty() && pending.begin()->first == next_write) {
                        options.sink->write(pending.begin()->second);
                        pending.erase(pending.begin());
                        ++next_write;
                    }
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) error = std::current_exception();
                stop = true;
                return;
            }
        }
    };

    const int threads = std::min<int>(manifest.parallelism, manifest.games);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    return records;
}

}  // namespace llmchess::orchestrator
