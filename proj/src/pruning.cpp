#include "entroprune/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "entroprune/errors.hpp"

namespace entroprune {

void PruneSchedule::validate(const ModelConfig& config) const {
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) {
    throw ConfigError("keep rate must lie in (0, 1], got " + std::to_string(keep_rate));
  }
  for (std::size_t b : blocks) {
    if (b < 1 || b > config.depth) {
      throw ConfigError("pruning block " + std::to_string(b) + " outside 1.." + std::to_string(config.depth));
    }
  }
  try {
    criterion.validate();
  } catch (const InvalidOrderError& e) {
    throw ConfigError(e.what());
  }
}

std::size_t keep_count(double keep_rate, std::size_t m) {
  if (m == 0) return 0;
  const double raw = std::ceil(keep_rate * static_cast<double>(m) - 1e-9);
  return std::clamp<std::size_t>(raw < 1.0 ? 1 : static_cast<std::size_t>(raw), 1, m);
}

Selection select_keep(const EntropyScores& scores, double keep_rate) {
  const std::size_t m = scores.values.size();
  if (m == 0) throw EmptyInputError("select_keep: no scores");
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw ConfigError("keep rate must lie in (0, 1]");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& v = scores.values;
  if (scores.higher_is_important()) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return v[a] != v[b] ? v[a] > v[b] : a < b;
    });
  } else {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return v[a] != v[b] ? v[a] < v[b] : a < b;
    });
  }

  const std::size_t k = keep_count(keep_rate, m);
  Selection s{{order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)},
              {order.begin() + static_cast<std::ptrdiff_t>(k), order.end()}};
  std::sort(s.kept.begin(), s.kept.end());
  std::sort(s.dropped.begin(), s.dropped.end());
  return s;
}

TokenMatrix gather_tokens(const TokenMatrix& x, std::span<const std::size_t> kept) {
  const std::size_t patches = x.patch_count();
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] >= patches) throw IndexError("kept position " + std::to_string(kept[i]) + " out of range");
    if (i > 0 && kept[i] <= kept[i - 1]) throw IndexError("kept positions must be strictly increasing");
  }
  TokenMatrix out;
  out.tokens = Matrix(kept.size() + 1, x.dim());
  out.patch_ids.reserve(kept.size());
  std::copy(x.tokens.row(0).begin(), x.tokens.row(0).end(), out.tokens.row(0).begin());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    auto src = x.tokens.row(kept[i] + 1);
    std::copy(src.begin(), src.end(), out.tokens.row(i + 1).begin());
    out.patch_ids.push_back(x.patch_ids[kept[i]]);
  }
  return out;
}

Selection random_prune_baseline(std::size_t m, double keep_rate, std::uint64_t seed) {
  if (m == 0) return {};
  return select_keep(EntropyScores{random_scores(m, seed), Criterion::random(seed), 0}, keep_rate);
}

std::vector<std::size_t> PruneTrace::trajectory() const {
  std::vector<std::size_t> t;
  if (!block_tokens.empty()) t.push_back(block_tokens.front());
  for (const auto& e : events) t.push_back(e.tokens_after);
  return t;
}

PrunedResult pruned_forward(TokenMatrix x, const VitModel& model, const PruneSchedule& schedule,
                            const BlockObserver& observer) {
  const auto& config = model.config;
  schedule.validate(config);

  PrunedResult result;
  result.trace.block_tokens.reserve(config.depth + 1);
  for (std::size_t i = 0; i < model.blocks.size(); ++i) {
    const std::size_t block = i + 1;
    result.trace.block_tokens.push_back(x.count());
    BlockOutput out = block_forward(x, model.blocks[i], config);
    if (observer) observer(block, x, out.attention);
    x = std::move(out.tokens);

    if (!schedule.blocks.contains(block) || x.patch_count() == 0) continue;

    PruneEvent event;
    event.block = block;
    event.scores = head_averaged_scores(out.attention, schedule.criterion, block, schedule.scoring);
    const Selection sel = select_keep(event.scores, schedule.keep_rate);
    for (std::size_t p : sel.kept) event.kept_ids.push_back(x.patch_ids[p]);
    for (std::size_t p : sel.dropped) event.dropped_ids.push_back(x.patch_ids[p]);
    event.tokens_before = x.count();
    x = gather_tokens(x, sel.kept);
    event.tokens_after = x.count();
    result.trace.events.push_back(std::move(event));
  }
  result.trace.block_tokens.push_back(x.count());
  result.probabilities = classify(x, model);
  return result;
}

PrunedResult pruned_forward(const Image& image, const VitModel& model, const PruneSchedule& schedule,
                            const BlockObserver& observer) {
  return pruned_forward(embed_tokens(patchify(image, model.config.patch_size), model), model, schedule,
                        observer);
}

}  // namespace entroprune
