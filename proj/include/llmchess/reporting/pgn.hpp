#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "llmchess/orchestrator/records.hpp"

namespace llmchess::reporting {

class PgnError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seven-tag roster plus Termination (and FailureReason for transport
/// failures). Throws PgnError when the ply list does not replay.
std::string export_pgn(const orchestrator::GameRecord& record);

struct PgnGame {
    std::vector<std::pair<std::string, std::string>> tags;
    std::vector<std::string> sans;  // canonical SAN, as chess-core formats it
    std::string result = "*";

    std::optional<std::string> tag(std::string_view name) const;
};

/// Reads one game from the standard start position. Comments, variations
/// and NAGs are skipped; every move is checked for legality.
PgnGame import_pgn(std::string_view text);

}  // namespace llmchess::reporting
