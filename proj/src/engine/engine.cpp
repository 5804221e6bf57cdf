#include "llmchess/engine/engine.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"

namespace llmchess::engine {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::optional<int> to_int(std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string_view limit_name(SearchLimit::Kind k) {
    switch (k) {
        case SearchLimit::Kind::Nodes: return "nodes";
        case SearchLimit::Kind::Depth: return "depth";
        case SearchLimit::Kind::MoveTime: return "movetime";
    }
    return "nodes";
}

}  // namespace

EvalScore EvalScore::mate(int n) {
    if (n == 0) throw std::invalid_argument("mate distance must be non-zero");
    return {Kind::Mate, n};
}

int EvalScore::to_centipawns() const noexcept {
    if (kind == Kind::Centipawns) return value;
    return value > 0 ? kMateScoreBase - value : -(kMateScoreBase + value);
}

std::string SearchLimit::go_command() const { return fmt::format("go {} {}", limit_name(kind), value); }

void EngineConfig::validate() const {
    if (path.empty()) throw std::invalid_argument("engine path is empty");
    if (multipv < 1) throw std::invalid_argument("multipv must be >= 1");
    if (limit.value < 1) throw std::invalid_argument("search limit must be positive");
    if (hash_mb < 1) throw std::invalid_argument("hash size must be >= 1 MB");
}

void to_json(nlohmann::json& j, const EngineConfig& c) {
    j = nlohmann::json{{"path", c.path},
                       {"args", c.args},
                       {std::string(limit_name(c.limit.kind)), c.limit.value},
                       {"multipv", c.multipv},
                       {"hash_mb", c.hash_mb},
                       {"handshake_timeout_ms", c.handshake_timeout.count()},
                       {"search_timeout_ms", c.search_timeout.count()}};
}

void from_json(const nlohmann::json& j, EngineConfig& c) {
    c = EngineConfig{};
    c.path = j.value("path", c.path);
    c.args = j.value("args", c.args);
    int kinds = 0;
    for (auto kind : {SearchLimit::Kind::Nodes, SearchLimit::Kind::Depth, SearchLimit::Kind::MoveTime}) {
        const std::string key(limit_name(kind));
        if (j.contains(key)) {
            c.limit = SearchLimit{kind, j.at(key).get<std::int64_t>()};
            ++kinds;
        }
    }
    if (kinds > 1) throw std::invalid_argument("engine config sets more than one search limit");
    c.multipv = j.value("multipv", c.multipv);
    c.hash_mb = j.value("hash_mb", c.hash_mb);
    c.handshake_timeout = std::chrono::milliseconds(j.value("handshake_timeout_ms", c.handshake_timeout.count()));
    c.search_timeout = std::chrono::milliseconds(j.value("search_timeout_ms", c.search_timeout.count()));
    c.validate();
}

int Engine::evaluate(const chess::Board& board) {
    if (chess::legal_moves(board).empty()) {
        if (!chess::in_check(board)) return 0;
        return board.side_to_move() == chess::Color::White ? -kMateScoreBase : kMateScoreBase;
    }
    const auto ranked = top_moves(board, evaluation_breadth());
    if (ranked.empty()) throw UnparsableOutput("engine returned no principal variation");
    const int relative = ranked.front().score.to_centipawns();
    return board.side_to_move() == chess::Color::White ? relative : -relative;
}

std::optional<InfoLine> parse_info_line(std::string_view line) {
    const auto tok = tokenize(line);
    if (tok.empty() || tok[0] != "info") return std::nullopt;
    InfoLine info;
    bool have_score = false;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] == "string") return std::nullopt;
        if (tok[i] == "multipv" && i + 1 < tok.size()) {
            auto v = to_int(tok[++i]);
            if (!v || *v < 1) return std::nullopt;
            info.multipv = *v;
        } else if (tok[i] == "depth" && i + 1 < tok.size()) {
            info.depth = to_int(tok[++i]).value_or(0);
        } else if (tok[i] == "score" && i + 2 < tok.size()) {
            auto v = to_int(tok[i + 2]);
            if (!v) return std::nullopt;
            if (tok[i + 1] == "cp") {
                info.score = EvalScore::cp(*v);
            } else if (tok[i + 1] == "mate") {
                if (*v == 0) return std::nullopt;
                info.score = EvalScore::mate(*v);
            } else {
                return std::nullopt;
            }
            i += 2;
            if (i + 1 < tok.size() && (tok[i + 1] == "lowerbound" || tok[i + 1] == "upperbound")) return std::nullopt;
            have_score = true;
        } else if (tok[i] == "pv" && i + 1 < tok.size()) {
            info.first_move = std::string(tok[i + 1]);
            break;
        }
    }
    if (!have_score || info.first_move.empty()) return std::nullopt;
    return info;
}

UciEngine::UciEngine(EngineConfig config, std::unique_ptr<Subprocess> process)
    : config_(std::move(config)), process_(std::move(process)) {}

UciEngine::~UciEngine() {
    if (process_) process_->terminate("quit", std::chrono::milliseconds(500));
}

std::unique_ptr<UciEngine> UciEngine::start(const EngineConfig& config) {
    config.validate();
    std::vector<std::string> argv{config.path};
    argv.insert(argv.end(), config.args.begin(), config.args.end());
    auto process = std::make_unique<Subprocess>(argv);
    std::unique_ptr<UciEngine> engine(new UciEngine(config, std::move(process)));
    engine->handshake();
    return engine;
}

std::string UciEngine::expect_line(std::chrono::milliseconds timeout, std::string_view waiting_for) {
    auto r = process_->read_line(timeout);
    switch (r.status) {
        case Subprocess::ReadStatus::Line: return std::move(r.line);
        case Subprocess::ReadStatus::Timeout:
            throw ProtocolTimeout(fmt::format("engine did not send '{}' within {} ms", waiting_for, timeout.count()));
        case Subprocess::ReadStatus::Eof: break;
    }
    throw EngineCrashed(fmt::format("engine exited while waiting for '{}'", waiting_for));
}

void UciEngine::sync(std::chrono::milliseconds timeout) {
    process_->write_line("isready");
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
        const auto left = std::max(std::chrono::milliseconds(0), std::chrono::duration_cast<std::chrono::milliseconds>(
                                                                      deadline - std::chrono::steady_clock::now()));
        const std::string line = expect_line(left, "readyok");
        if (line == "readyok") return;
        if (starts_with(line, "No such option")) throw OptionRejected(line);
    }
}

void UciEngine::handshake() {
    process_->write_line("uci");
    const auto deadline = std::chrono::steady_clock::now() + config_.handshake_timeout;
    for (;;) {
        const auto left = std::max(std::chrono::milliseconds(0), std::chrono::duration_cast<std::chrono::milliseconds>(
                                                                      deadline - std::chrono::steady_clock::now()));
        const std::string line = expect_line(left, "uciok");
        if (line == "uciok") break;
        if (starts_with(line, "id name ")) name_ = line.substr(8);
        if (starts_with(line, "option name MultiPV ")) advertises_multipv_ = true;
    }
    process_->write_line(fmt::format("setoption name Hash value {}", config_.hash_mb));
    set_multipv(config_.multipv);
    sync(config_.handshake_timeout);
}

void UciEngine::set_multipv(int k) {
    if (k == current_multipv_) return;
    if (!advertises_multipv_) throw OptionRejected("engine does not advertise a MultiPV option");
    process_->write_line(fmt::format("setoption name MultiPV value {}", k));
    current_multipv_ = k;
}

std::vector<RankedMove> UciEngine::top_moves(const chess::Board& board, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const std::string fen = board.fen();
    if (cache_ && cache_->fen == fen && cache_->k >= k) {
        std::vector<RankedMove> out(cache_->moves.begin(),
                                    cache_->moves.begin() + std::min<std::size_t>(k, cache_->moves.size()));
        return out;
    }

    set_multipv(k);
    sync(config_.handshake_timeout);
    process_->write_line("position fen " + fen);
    process_->write_line(config_.limit.go_command());

    std::map<int, InfoLine> latest;
    const auto deadline = std::chrono::steady_clock::now() + config_.search_timeout;
    for (;;) {
        const auto left = std::max(std::chrono::milliseconds(0), std::chrono::duration_cast<std::chrono::milliseconds>(
                                                                      deadline - std::chrono::steady_clock::now()));
        const std::string line = expect_line(left, "bestmove");
        if (starts_with(line, "bestmove")) break;
        if (auto info = parse_info_line(line); info && info->multipv <= k) latest[info->multipv] = *info;
    }

    std::vector<RankedMove> out;
    const auto legal_count = chess::legal_moves(board).size();
    for (int rank = 1; rank <= k; ++rank) {
        auto it = latest.find(rank);
        if (it == latest.end()) break;
        auto move = chess::find_uci_move(board, it->second.first_move);
        if (!move)
            throw UnparsableOutput(fmt::format("engine proposed '{}', which is not legal in {}", it->second.first_move, fen));
        out.push_back(RankedMove{*move, rank, it->second.score});
    }
    if (out.empty() && legal_count > 0) throw UnparsableOutput("engine search produced no multipv lines for " + fen);
    if (out.size() < std::min<std::size_t>(k, legal_count))
        throw UnparsableOutput(fmt::format("engine returned {} of {} expected lines for {}", out.size(),
                                           std::min<std::size_t>(k, legal_count), fen));
    cache_ = Cached{fen, k, out};
    return out;
}

ReplySample sample_reply_detailed(Engine& engine, const chess::Board& board, Rng& rng) {
    ReplySample sample;
    sample.candidates = engine.top_moves(board, 3);
    if (sample.candidates.empty()) throw EngineError("no candidate replies for " + board.fen());
    sample.chosen = rng.uniform_index(sample.candidates.size());
    sample.move = sample.candidates[sample.chosen].move;
    return sample;
}

chess::Move sample_reply(Engine& engine, const chess::Board& board, Rng& rng) {
    return sample_reply_detailed(engine, board, rng).move;
}

std::string sample_opening(Rng& rng) { return std::string(kOpenings[rng.uniform_index(std::size(kOpenings))]); }

}  // namespace llmchess::engine
