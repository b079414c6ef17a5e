#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cognav/codec.hpp"
#include "json.hpp"

namespace cognav::detail {

// Lowercases ASCII letters, trims, and collapses whitespace runs to single
// spaces.
std::string normalize_semantic(std::string_view text);

// Structure readers shared by the strict parsers and the lenient model-text
// extractor. Issues are appended; the result is present only when no error
// was recorded for that structure.
std::optional<CognitiveMap> read_map(const nlohmann::json& j, const std::string& base,
                                     std::vector<ParseIssue>& issues);
std::optional<PlanChain> read_chain(const nlohmann::json& j, const std::string& base,
                                    std::vector<ParseIssue>& issues);

nlohmann::json map_to_json(const CognitiveMap& map);
nlohmann::json chain_to_json(const PlanChain& chain);

}  // namespace cognav::detail
