#pragma once

#include <json.hpp>

#include "entroprune/pruning.hpp"

namespace entroprune {

/// {"block", "criterion", "alpha", "patch_ids", "kept_ids", "dropped_ids",
///  "scores", "tokens_before", "tokens_after"}. scores[i] belongs to
/// patch_ids[i] (the incoming patches). alpha is 1 for shannon, the order
/// for renyi, and null otherwise.
nlohmann::json to_json(const PruneEvent& event);

/// {"trajectory": [...], "block_tokens": [...], "events": [...]}
nlohmann::json to_json(const PruneTrace& trace);

nlohmann::json criterion_json(const Criterion& criterion);

}  // namespace entroprune
