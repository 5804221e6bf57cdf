#include "llmchess/extract/extractor.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "llmchess/chess/san.hpp"
#include "llmchess/prompt/assets.hpp"

namespace llmchess::extract {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

constexpr std::string_view kLeading = "\"'([{<*_`";
constexpr std::string_view kTrailing = "\"')]}>*_`.,;:!?";

}  // namespace

std::string_view method_name(Method m) noexcept { return m == Method::Direct ? "direct" : "llm-assisted"; }

Method method_from_name(std::string_view name) {
    if (name == "direct") return Method::Direct;
    if (name == "llm-assisted") return Method::LlmAssisted;
    throw std::invalid_argument("unknown extraction method '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const ExtractionResult& r) {
    j = nlohmann::json{{"candidate", r.candidate ? nlohmann::json(*r.candidate) : nlohmann::json(nullptr)},
                       {"method", method_name(r.method)},
                       {"tokens", r.tokens}};
    if (r.fallback) j["fallback"] = true;
    if (r.extractor_output) j["extractor_output"] = *r.extractor_output;
}

void from_json(const nlohmann::json& j, ExtractionResult& r) {
    r = ExtractionResult{};
    if (!j.at("candidate").is_null()) r.candidate = j.at("candidate").get<std::string>();
    r.method = method_from_name(j.at("method").get<std::string>());
    r.tokens = j.value("tokens", std::vector<std::string>{});
    r.fallback = j.value("fallback", false);
    if (j.contains("extractor_output")) r.extractor_output = j.at("extractor_output").get<std::string>();
}

std::string clean_token(std::string_view word) {
    std::string_view w = word;
    while (!w.empty() && kLeading.find(w.front()) != std::string_view::npos) w.remove_prefix(1);
    std::size_t digits = 0;
    while (digits < w.size() && std::isdigit(static_cast<unsigned char>(w[digits]))) ++digits;
    if (digits > 0 && digits < w.size() && w[digits] == '.') {
        w.remove_prefix(digits);
        while (!w.empty() && w.front() == '.') w.remove_prefix(1);
    }
    // '+' and '#' stay attached; normalize_san deals with them.
    while (!w.empty() && kTrailing.find(w.back()) != std::string_view::npos) w.remove_suffix(1);
    return std::string(w);
}

std::vector<std::string> san_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_space(text[j])) ++j;
        if (j > i) {
            // "e4/d4" and "Nf3,Nc3" offer options; split on the separators too.
            std::string word(text.substr(i, j - i));
            std::size_t a = 0;
            while (a <= word.size()) {
                std::size_t b = word.find_first_of("/,", a);
                if (b == std::string::npos) b = word.size();
                const std::string tok = clean_token(std::string_view(word).substr(a, b - a));
                if (!tok.empty() && chess::is_san_shaped(tok)) out.push_back(tok);
                a = b + 1;
            }
        }
        i = j;
    }
    return out;
}

ExtractionResult extract_direct(std::string_view response) {
    ExtractionResult r;
    r.method = Method::Direct;
    r.raw = std::string(response);
    r.tokens = san_tokens(response);
    if (!r.tokens.empty()) r.candidate = r.tokens.back();
    return r;
}

std::vector<Shot> parse_shots(std::string_view text) {
    std::vector<Shot> shots;
    std::istringstream in{std::string(text)};
    std::string line;
    enum { None, Input, Output } state = None;
    Shot current;
    auto flush = [&] {
        if (state == Output) {
            current.input = std::string(trim(current.input));
            current.output = std::string(trim(current.output));
            if (current.input.empty() || current.output.empty())
                throw std::invalid_argument("extraction shot with empty input or output");
            shots.push_back(current);
        }
        current = Shot{};
    };
    while (std::getline(in, line)) {
        if (line == "=== INPUT") {
            flush();
            state = Input;
        } else if (line == "=== OUTPUT") {
            if (state != Input) throw std::invalid_argument("extraction shots: OUTPUT without INPUT");
            state = Output;
        } else if (state == Input) {
            current.input += line + "\n";
        } else if (state == Output) {
            current.output += line + "\n";
        } else if (!trim(line).empty()) {
            throw std::invalid_argument("extraction shots: text before the first INPUT block");
        }
    }
    if (state == Input) throw std::invalid_argument("extraction shots: INPUT without OUTPUT");
    flush();
    return shots;
}

const std::vector<Shot>& default_shots() {
    static const std::vector<Shot> shots = parse_shots(prompt::assets::extraction_shots);
    return shots;
}

std::vector<chat::ChatMessage> extraction_messages(const std::vector<Shot>& shots, std::string_view response) {
    std::vector<chat::ChatMessage> msgs;
    msgs.push_back(chat::ChatMessage::system(std::string(kExtractionInstruction), chat::Annotation::ExtractionShot));
    for (const Shot& s : shots) {
        msgs.push_back(chat::ChatMessage::user(s.input, chat::Annotation::ExtractionShot));
        msgs.push_back(chat::ChatMessage::assistant(s.output, chat::Annotation::ExtractionShot));
    }
    msgs.push_back(chat::ChatMessage::user(std::string(response)));
    return msgs;
}

ExtractionResult extract_llm(std::string_view response, const SessionFactory& factory, const std::vector<Shot>& shots) {
    chat::ChatSession session = factory();
    const std::string output = session.complete(extraction_messages(shots, response));
    const std::string_view trimmed = trim(output);
    const std::string cleaned = clean_token(trimmed);
    const bool single_word =
        !trimmed.empty() && std::none_of(trimmed.begin(), trimmed.end(), [](char c) { return is_space(c); });
    if (single_word && chess::is_san_shaped(cleaned)) {
        ExtractionResult r;
        r.method = Method::LlmAssisted;
        r.raw = std::string(response);
        r.tokens = san_tokens(response);
        r.candidate = cleaned;
        r.extractor_output = output;
        return r;
    }
    ExtractionResult r = extract_direct(response);
    r.fallback = true;
    r.extractor_output = output;
    return r;
}

}  // namespace llmchess::extract
