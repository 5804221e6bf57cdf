#include "llmchess/orchestrator/records.hpp"

#include <fmt/format.h>

namespace llmchess::orchestrator {

namespace {

constexpr std::pair<Termination, std::string_view> kNames[] = {
    {Termination::Checkmate, "checkmate"},
    {Termination::Stalemate, "stalemate"},
    {Termination::DrawFiftyMove, "draw-fifty-move"},
    {Termination::DrawThreefold, "draw-threefold"},
    {Termination::DrawInsufficientMaterial, "draw-insufficient-material"},
    {Termination::IllegalLimit, "illegal-limit"},
    {Termination::MoveCap, "move-cap"},
    {Termination::TransportFailure, "transport-failure"},
};

chess::Color color_from_name(std::string_view s) {
    if (s == "white") return chess::Color::White;
    if (s == "black") return chess::Color::Black;
    throw RecordError(fmt::format("unknown color '{}'", s));
}

}  // namespace

std::string_view termination_name(Termination t) noexcept {
    for (const auto& [k, name] : kNames)
        if (k == t) return name;
    return "transport-failure";
}

Termination termination_from_name(std::string_view name) {
    for (const auto& [k, n] : kNames)
        if (n == name) return k;
    throw RecordError(fmt::format("unknown termination '{}'", name));
}

std::optional<Termination> termination_from_status(chess::GameStatus s) noexcept {
    switch (s) {
        case chess::GameStatus::Ongoing: return std::nullopt;
        case chess::GameStatus::Checkmate: return Termination::Checkmate;
        case chess::GameStatus::Stalemate: return Termination::Stalemate;
        case chess::GameStatus::DrawFiftyMove: return Termination::DrawFiftyMove;
        case chess::GameStatus::DrawThreefold: return Termination::DrawThreefold;
        case chess::GameStatus::DrawInsufficientMaterial: return Termination::DrawInsufficientMaterial;
    }
    return std::nullopt;
}

bool is_natural(Termination t) noexcept {
    switch (t) {
        case Termination::Checkmate:
        case Termination::Stalemate:
        case Termination::DrawFiftyMove:
        case Termination::DrawThreefold:
        case Termination::DrawInsufficientMaterial: return true;
        default: return false;
    }
}

int MoveAttemptLog::r() const noexcept {
    int n = 0;
    for (const auto& a : attempts)
        if (!a.legal()) ++n;
    return n;
}

int GameRecord::n() const noexcept {
    int count = 0;
    for (const auto& m : moves)
        if (m.legal()) ++count;
    return count;
}

std::string GameRecord::result() const {
    switch (termination) {
        case Termination::Checkmate:
            if (plies.empty()) return "*";
            return plies.back().mover == chess::Color::White ? "1-0" : "0-1";
        case Termination::Stalemate:
        case Termination::DrawFiftyMove:
        case Termination::DrawThreefold:
        case Termination::DrawInsufficientMaterial: return "1/2-1/2";
        default: return "*";
    }
}

std::vector<std::string> GameRecord::sans() const {
    std::vector<std::string> out;
    out.reserve(plies.size());
    for (const auto& p : plies) out.push_back(p.san);
    return out;
}

void to_json(nlohmann::json& j, const Attempt& a) {
    j = nlohmann::json{{"raw", a.raw},
                       {"candidate", a.candidate ? nlohmann::json(*a.candidate) : nlohmann::json(nullptr)},
                       {"verdict", chess::verdict_name(a.verdict)},
                       {"method", a.method}};
    if (a.fallback) j["fallback"] = true;
    if (a.refusal) j["refusal"] = true;
}

void from_json(const nlohmann::json& j, Attempt& a) {
    a = Attempt{};
    a.raw = j.at("raw").get<std::string>();
    if (j.contains("candidate") && !j.at("candidate").is_null()) a.candidate = j.at("candidate").get<std::string>();
    const auto v = chess::verdict_from_name(j.at("verdict").get<std::string>());
    if (!v) throw RecordError("unknown verdict " + j.at("verdict").dump());
    a.verdict = *v;
    a.method = j.value("method", a.method);
    a.fallback = j.value("fallback", false);
    a.refusal = j.value("refusal", false);
}

void to_json(nlohmann::json& j, const MoveAttemptLog& l) {
    j = nlohmann::json{{"index", l.index},
                       {"fen", l.fen},
                       {"attempts", l.attempts},
                       {"final_san", l.final_san ? nlohmann::json(*l.final_san) : nlohmann::json(nullptr)}};
}

void from_json(const nlohmann::json& j, MoveAttemptLog& l) {
    l = MoveAttemptLog{};
    l.index = j.at("index").get<int>();
    l.fen = j.at("fen").get<std::string>();
    l.attempts = j.at("attempts").get<std::vector<Attempt>>();
    if (j.contains("final_san") && !j.at("final_san").is_null()) l.final_san = j.at("final_san").get<std::string>();
}

void to_json(nlohmann::json& j, const Ply& p) { j = nlohmann::json{{"san", p.san}, {"mover", chess::color_name(p.mover)}}; }

void from_json(const nlohmann::json& j, Ply& p) {
    p.san = j.at("san").get<std::string>();
    p.mover = color_from_name(j.at("mover").get<std::string>());
}

void to_json(nlohmann::json& j, const GameRecord& g) {
    j = nlohmann::json{{"game_id", g.game_id},
                       {"variation", g.variation},
                       {"config_hash", g.config_hash},
                       {"opening", g.opening},
                       {"seed", g.seed},
                       {"engine", g.engine},
                       {"plies", g.plies},
                       {"moves", g.moves},
                       {"evaluations", g.evaluations},
                       {"termination", termination_name(g.termination)},
                       {"n", g.n()},
                       {"result", g.result()},
                       {"transcript_ref", g.transcript_ref},
                       {"retries", g.retries}};
    if (!g.failure.empty()) j["failure"] = g.failure;
}

void from_json(const nlohmann::json& j, GameRecord& g) {
    g = GameRecord{};
    g.game_id = j.at("game_id").get<std::uint64_t>();
    g.variation = j.at("variation").get<std::string>();
    g.config_hash = j.value("config_hash", "");
    g.opening = j.at("opening").get<std::string>();
    g.seed = j.at("seed").get<std::uint64_t>();
    g.engine = j.value("engine", "");
    g.plies = j.at("plies").get<std::vector<Ply>>();
    g.moves = j.at("moves").get<std::vector<MoveAttemptLog>>();
    g.evaluations = j.at("evaluations").get<std::vector<int>>();
    g.termination = termination_from_name(j.at("termination").get<std::string>());
    g.failure = j.value("failure", "");
    g.transcript_ref = j.value("transcript_ref", "");
    g.retries = j.value("retries", 0);
    if (j.contains("n") && j.at("n").get<int>() != g.n())
        throw RecordError(fmt::format("game {}: stored n disagrees with its attempt logs", g.game_id));
}

void to_json(nlohmann::json& j, const ProbeRecord& p) {
    j = nlohmann::json{{"game_id", p.game_id},
                       {"fraction", p.fraction},
                       {"original_plies", p.original_plies},
                       {"truncated_plies", p.truncated_plies},
                       {"fen", p.fen},
                       {"next_move", p.next_move},
                       {"response", p.response},
                       {"suggestions", p.suggestions},
                       {"engine_top", p.engine_top},
                       {"alignment", p.alignment},
                       {"suggestions_valid", p.suggestions_valid},
                       {"insight", p.insight}};
    if (!p.failure.empty()) j["failure"] = p.failure;
}

void from_json(const nlohmann::json& j, ProbeRecord& p) {
    p = ProbeRecord{};
    p.game_id = j.at("game_id").get<std::uint64_t>();
    p.fraction = j.at("fraction").get<double>();
    p.original_plies = j.at("original_plies").get<int>();
    p.truncated_plies = j.at("truncated_plies").get<int>();
    p.fen = j.at("fen").get<std::string>();
    p.next_move = j.at("next_move").get<std::string>();
    p.response = j.at("response").get<std::string>();
    p.suggestions = j.at("suggestions").get<std::vector<std::string>>();
    p.engine_top = j.at("engine_top").get<std::vector<std::string>>();
    p.alignment = j.at("alignment").get<bool>();
    p.suggestions_valid = j.at("suggestions_valid").get<bool>();
    p.insight = j.value("insight", "");
    p.failure = j.value("failure", "");
}

}  // namespace llmchess::orchestrator
