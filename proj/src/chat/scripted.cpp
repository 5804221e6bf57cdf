#include "llmchess/chat/scripted.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace llmchess::chat {

namespace {

ScriptItem parse_item(const nlohmann::json& j, std::size_t line_no) {
    if (j.is_string()) return {ScriptItem::Kind::Text, j.get<std::string>()};
    if (j.is_object() && j.contains("error")) {
        const std::string kind = j.at("error").get<std::string>();
        if (kind == "transport") return {ScriptItem::Kind::TransportFault, j.value("message", "scripted transport fault")};
        if (kind == "refusal") return {ScriptItem::Kind::Refusal, j.value("message", "scripted refusal")};
        throw ScriptError(fmt::format("script line {}: unknown error kind '{}'", line_no, kind));
    }
    throw ScriptError(fmt::format("script line {}: items must be strings or error objects", line_no));
}

}  // namespace

Script Script::parse(std::string_view jsonl) {
    Script script;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ScriptError(fmt::format("script line {}: {}", line_no, e.what()));
        }
        std::vector<ScriptItem> slot;
        if (j.is_array()) {
            for (const auto& item : j) slot.push_back(parse_item(item, line_no));
        } else {
            slot.push_back(parse_item(j, line_no));
        }
        if (slot.empty()) throw ScriptError(fmt::format("script line {}: empty slot", line_no));
        script.slots.push_back(std::move(slot));
    }
    return script;
}

Script Script::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScriptError("cannot open mock script " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

ScriptedAdapter::ScriptedAdapter(std::shared_ptr<const Script> script) : script_(std::move(script)) {
    if (!script_ || script_->slots.empty()) throw AdapterConfigError("mock script has no slots");
}

std::string ScriptedAdapter::generate(const AdapterRequest& request) {
    const auto& slots = script_->slots;
    const std::size_t s = std::min<std::size_t>(static_cast<std::size_t>(request.slot), slots.size() - 1);
    const auto& alternatives = slots[s];
    const bool past_end = static_cast<std::size_t>(request.slot) >= slots.size();
    const std::size_t a =
        past_end ? alternatives.size() - 1
                 : std::min<std::size_t>(static_cast<std::size_t>(request.attempt), alternatives.size() - 1);
    const ScriptItem& item = alternatives[a];
    switch (item.kind) {
        case ScriptItem::Kind::TransportFault: throw TransportError(item.text);
        case ScriptItem::Kind::Refusal: throw RefusalError(item.text);
        case ScriptItem::Kind::Text: break;
    }
    return item.text;
}

}  // namespace llmchess::chat
