#pragma once

#include <string_view>

namespace llmchess::prompt::assets {

/// Rules-summary document inserted by the Int-Rules variation.
extern const std::string_view rules_summary;
/// Eight reasoning -> SAN pairs used to seed the extraction sessions.
extern const std::string_view extraction_shots;

}  // namespace llmchess::prompt::assets
