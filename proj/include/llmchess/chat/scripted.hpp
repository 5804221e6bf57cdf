#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmchess/chat/adapter.hpp"

namespace llmchess::chat {

class ScriptError : public ChatError {
public:
    using ChatError::ChatError;
};

/// One scripted reply: text, or an injected fault.
struct ScriptItem {
    enum class Kind { Text, TransportFault, Refusal };
    Kind kind = Kind::Text;
    std::string text;

    friend bool operator==(const ScriptItem&, const ScriptItem&) = default;
};

/// Alternatives for each assistant slot, in call order. A JSONL script has
/// one line per slot holding an array (or a single item); an item is a
/// string or {"error": "transport"|"refusal"}.
struct Script {
    std::vector<std::vector<ScriptItem>> slots;

    static Script parse(std::string_view jsonl);
    static Script load(const std::filesystem::path& path);
};

/// Replays a Script. Call n on slot s returns slot s's n-th item; once the
/// alternatives run out the last one repeats. Slots past the end repeat the
/// final slot's last item.
class ScriptedAdapter final : public ChatAdapter {
public:
    explicit ScriptedAdapter(std::shared_ptr<const Script> script);

    std::string generate(const AdapterRequest& request) override;
    bool supports_prefix() const override { return true; }
    std::string name() const override { return "mock-scripted"; }

private:
    std::shared_ptr<const Script> script_;
};

}  // namespace llmchess::chat
