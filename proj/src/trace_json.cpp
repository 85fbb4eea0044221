#include "entroprune/trace_json.hpp"

#include <algorithm>

namespace entroprune {

nlohmann::json criterion_json(const Criterion& c) {
  nlohmann::json j = {{"criterion", c.name()}};
  switch (c.kind) {
    case Criterion::Kind::shannon: j["alpha"] = 1.0; break;
    case Criterion::Kind::renyi: j["alpha"] = c.alpha; break;
    default: j["alpha"] = nullptr; break;
  }
  if (c.kind == Criterion::Kind::random) j["seed"] = c.seed;
  return j;
}

nlohmann::json to_json(const PruneEvent& e) {
  nlohmann::json j = criterion_json(e.scores.criterion);
  j["block"] = e.block;
  std::vector<std::size_t> incoming = e.kept_ids;
  incoming.insert(incoming.end(), e.dropped_ids.begin(), e.dropped_ids.end());
  std::sort(incoming.begin(), incoming.end());
  j["patch_ids"] = incoming;
  j["kept_ids"] = e.kept_ids;
  j["dropped_ids"] = e.dropped_ids;
  j["scores"] = e.scores.values;
  j["tokens_before"] = e.tokens_before;
  j["tokens_after"] = e.tokens_after;
  return j;
}

nlohmann::json to_json(const PruneTrace& t) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : t.events) events.push_back(to_json(e));
  return {{"trajectory", t.trajectory()}, {"block_tokens", t.block_tokens}, {"events", std::move(events)}};
}

}  // namespace entroprune
