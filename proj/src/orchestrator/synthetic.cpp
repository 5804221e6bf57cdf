#include "llmchess/orchestrator/synthetic.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "llmchess/chess/movegen.hpp"
#include "llmchess/chess/san.hpp"
#include "llmchess/engine/material.hpp"
#include "llmchess/extract/extractor.hpp"
#include "llmchess/orchestrator/records.hpp"
#include "llmchess/rng.hpp"

namespace llmchess::orchestrator {

namespace {

constexpr std::string_view kGarbage[] = {
    "I am not sure which move to play here.",
    "Let me think about this position for a moment.",
    "Your move is interesting. I need more time.",
};

constexpr std::uint64_t kProbeStream = 0x70726f6265ULL;

std::string legal_choice_name(LegalChoice c) { return c == LegalChoice::Greedy ? "greedy" : "random"; }

LegalChoice legal_choice_from(const std::string& s) {
    if (s == "greedy") return LegalChoice::Greedy;
    if (s == "random") return LegalChoice::Random;
    throw RecordError("unknown legal choice '" + s + "'");
}

std::string style_name(ResponseStyle s) {
    switch (s) {
        case ResponseStyle::Plain: return "plain";
        case ResponseStyle::Sentence: return "sentence";
        case ResponseStyle::Reasoning: return "reasoning";
    }
    return "plain";
}

ResponseStyle style_from(const std::string& s) {
    if (s == "plain") return ResponseStyle::Plain;
    if (s == "sentence") return ResponseStyle::Sentence;
    if (s == "reasoning") return ResponseStyle::Reasoning;
    throw RecordError("unknown response style '" + s + "'");
}

std::string dress(ResponseStyle style, const std::string& san) {
    switch (style) {
        case ResponseStyle::Plain: return san;
        case ResponseStyle::Sentence: return fmt::format("I will play {}.", san);
        case ResponseStyle::Reasoning:
            return fmt::format("Looking at the position, I want to keep my pieces active and my king safe. "
                               "My move is {}.",
                               san);
    }
    return san;
}

// A SAN-shaped piece move that matches no legal move.
std::string fresh_illegal(Rng& rng, const chess::Board& board) {
    static constexpr char kPieces[] = {'N', 'B', 'R', 'Q', 'K'};
    for (int tries = 0; tries < 256; ++tries) {
        const char piece = kPieces[rng.uniform_index(5)];
        const char file = static_cast<char>('a' + rng.uniform_index(8));
        const char rank = static_cast<char>('1' + rng.uniform_index(8));
        const std::string text{piece, file, rank};
        if (chess::classify_san(board, text).verdict == chess::SanVerdict::Illegal) return text;
    }
    return "Ka9";  // not SAN-shaped; judged not-a-move
}

chess::Move choose_legal(LegalChoice choice, Rng& rng, const chess::Board& board) {
    if (choice == LegalChoice::Greedy) return engine::MaterialEngine::rank_all(board).front().move;
    const auto moves = chess::legal_moves(board);
    return moves[rng.uniform_index(moves.size())];
}

}  // namespace

void PositionFeed::set(chess::Board board, std::vector<std::string> plies, int move_index) {
    board_ = std::move(board);
    plies_ = std::move(plies);
    move_index_ = move_index;
    ++version_;
}

void SyntheticProfile::validate() const {
    for (double p : {p_offend, p_continue, p_repeat, p_garbage})
        if (!(p >= 0.0 && p <= 1.0)) throw RecordError("synthetic probabilities must lie in [0, 1]");
    for (const auto& [index, move] : plan) {
        if (index < 1) throw RecordError("synthetic plan move indices start at 1");
        if (move.give_up && move.illegal.empty()) throw RecordError("a give-up plan needs at least one text");
        if (static_cast<int>(move.illegal.size()) > kMaxAttempts)
            throw RecordError(fmt::format("plan for move {} exceeds {} attempts", index, kMaxAttempts));
    }
}

const SyntheticProfile& SyntheticPopulation::for_game(std::uint64_t game_id) const {
    if (profiles.empty()) throw RecordError("synthetic population is empty");
    return profiles[(game_id == 0 ? 0 : game_id - 1) % profiles.size()];
}

void to_json(nlohmann::json& j, const MovePlan& p) {
    j = nlohmann::json{{"illegal", p.illegal}};
    if (p.give_up) j["give_up"] = true;
}

void from_json(const nlohmann::json& j, MovePlan& p) {
    p.illegal = j.value("illegal", std::vector<std::string>{});
    p.give_up = j.value("give_up", false);
}

void to_json(nlohmann::json& j, const SyntheticProfile& p) {
    j = nlohmann::json{{"p_offend", p.p_offend},
                       {"p_continue", p.p_continue},
                       {"p_repeat", p.p_repeat},
                       {"p_garbage", p.p_garbage},
                       {"legal", legal_choice_name(p.legal)},
                       {"style", style_name(p.style)}};
    if (!p.plan.empty()) {
        nlohmann::json plan = nlohmann::json::object();
        for (const auto& [index, move] : p.plan) plan[std::to_string(index)] = move;
        j["plan"] = plan;
    }
}

void from_json(const nlohmann::json& j, SyntheticProfile& p) {
    p = SyntheticProfile{};
    p.p_offend = j.value("p_offend", p.p_offend);
    p.p_continue = j.value("p_continue", p.p_continue);
    p.p_repeat = j.value("p_repeat", p.p_repeat);
    p.p_garbage = j.value("p_garbage", p.p_garbage);
    p.legal = legal_choice_from(j.value("legal", std::string("greedy")));
    p.style = style_from(j.value("style", std::string("plain")));
    if (j.contains("plan"))
        for (const auto& [key, value] : j.at("plan").items()) p.plan[std::stoi(key)] = value.get<MovePlan>();
    p.validate();
}

void to_json(nlohmann::json& j, const SyntheticPopulation& p) { j = nlohmann::json{{"profiles", p.profiles}}; }

void from_json(const nlohmann::json& j, SyntheticPopulation& p) {
    p.profiles = j.at("profiles").get<std::vector<SyntheticProfile>>();
    if (p.profiles.empty()) throw RecordError("synthetic population is empty");
}

std::vector<std::string> plan_responses(const SyntheticProfile& profile, std::uint64_t seed, const chess::Board& board,
                                        int move_index) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(move_index)));
    std::vector<std::string> out;

    if (auto it = profile.plan.find(move_index); it != profile.plan.end()) {
        out = it->second.illegal;
        if (it->second.give_up) {
            for (std::size_t i = 0; out.size() < static_cast<std::size_t>(kMaxAttempts); ++i) out.push_back(out[i]);
            return out;
        }
    } else if (rng.bernoulli(profile.p_offend)) {
        int count = 1;
        while (count < kMaxAttempts && rng.bernoulli(profile.p_continue)) ++count;
        std::vector<std::string> moves;  // distinct SAN texts used so far
        for (int i = 0; i < count; ++i) {
            if (rng.bernoulli(profile.p_garbage)) {
                out.emplace_back(kGarbage[rng.uniform_index(std::size(kGarbage))]);
                continue;
            }
            std::string san;
            if (!moves.empty() && rng.bernoulli(profile.p_repeat))
                san = moves[rng.uniform_index(moves.size())];
            else
                san = fresh_illegal(rng, board);
            if (std::find(moves.begin(), moves.end(), san) == moves.end()) moves.push_back(san);
            out.push_back(dress(profile.style, san));
        }
        if (count == kMaxAttempts) return out;
    }
    out.push_back(dress(profile.style, chess::format_san(board, choose_legal(profile.legal, rng, board))));
    return out;
}

SyntheticPlayer::SyntheticPlayer(SyntheticProfile profile, std::uint64_t seed, std::shared_ptr<const PositionFeed> feed)
    : profile_(std::move(profile)), seed_(seed), feed_(std::move(feed)) {
    if (!feed_) throw chat::AdapterConfigError("synthetic player needs a position feed");
    profile_.validate();
}

std::string SyntheticPlayer::generate(const chat::AdapterRequest&) {
    const chess::Board& board = feed_->board();
    if (feed_->move_index() == 0) {
        // Probe question: name the greedy choice and one other legal move.
        Rng rng(derive_seed(seed_ ^ kProbeStream, feed_->plies().size()));
        const auto ranked = engine::MaterialEngine::rank_all(board);
        if (ranked.empty()) return "There is no legal move for black here.";
        const std::string best = chess::format_san(board, ranked.front().move);
        if (ranked.size() == 1) return fmt::format("Black's best move is {}.", best);
        const auto& other = ranked[1 + rng.uniform_index(ranked.size() - 1)];
        return fmt::format("Black's best move is {}, since it keeps the material balance. {} also deserves attention.",
                           best, chess::format_san(board, other.move));
    }
    if (feed_->version() != seen_version_) {
        seen_version_ = feed_->version();
        responses_ = plan_responses(profile_, seed_, board, feed_->move_index());
        next_ = 0;
    }
    const std::string& text = responses_[std::min(next_, responses_.size() - 1)];
    ++next_;
    return text;
}

std::string FaithfulExtractor::generate(const chat::AdapterRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role != chat::Role::User) continue;
        const auto result = extract::extract_direct(it->content);
        return result.candidate.value_or("none");
    }
    return "none";
}

}  // namespace llmchess::orchestrator
