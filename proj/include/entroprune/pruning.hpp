#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <vector>

#include "entroprune/entropy.hpp"
#include "entroprune/vit.hpp"

namespace entroprune {

/// Where and how hard to prune. Block positions are 1-based; pruning runs
/// after the whole block (MHSA + FFN) has finished.
struct PruneSchedule {
  std::set<std::size_t> blocks = {4, 7, 10};
  double keep_rate = 0.7;
  Criterion criterion = Criterion::shannon();
  ScoringOptions scoring;

  static PruneSchedule dense() { return {{}, 1.0, Criterion::shannon(), {}}; }

  /// Throws ConfigError for keep rates outside (0, 1], block positions
  /// outside 1..depth, or an invalid criterion.
  void validate(const ModelConfig& config) const;
};

/// ⌈r·m⌉ patches survive; a tolerance of 1e-9 absorbs binary rounding in r·m
/// (0.3·10 keeps 3, not 4). At least one patch survives whenever m >= 1.
std::size_t keep_count(double keep_rate, std::size_t m);

/// Positions (0-based among the scored patches), each list ascending.
struct Selection {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
};

/// Keeps the keep_count(r, m) most important patches: lowest scores for
/// entropy criteria, highest for evit. Ties go to the smaller position,
/// which is also the smaller original patch id.
Selection select_keep(const EntropyScores& scores, double keep_rate);

/// Class token plus the listed patch rows, in order. `kept` must be strictly
/// increasing and in range (IndexError otherwise).
TokenMatrix gather_tokens(const TokenMatrix& x, std::span<const std::size_t> kept);

/// Uniformly random subset of size keep_count(r, m), reproducible from seed.
Selection random_prune_baseline(std::size_t m, double keep_rate, std::uint64_t seed);

struct PruneEvent {
  std::size_t block = 0;  // 1-based
  EntropyScores scores;
  std::vector<std::size_t> kept_ids;     // original patch ids
  std::vector<std::size_t> dropped_ids;  // original patch ids
  std::size_t tokens_before = 0;
  std::size_t tokens_after = 0;
};

struct PruneTrace {
  std::vector<PruneEvent> events;
  /// Token count entering each block (length depth), then the count reaching the head.
  std::vector<std::size_t> block_tokens;

  /// Initial count followed by the count after each pruning event, e.g. 197, 139, 98, 69.
  std::vector<std::size_t> trajectory() const;
};

struct PrunedResult {
  std::vector<double> probabilities;
  PruneTrace trace;
};

/// Called once per block with the block's 1-based index, its input tokens
/// and the attention it computed.
using BlockObserver =
    std::function<void(std::size_t block, const TokenMatrix& input, const AttentionTensor& attention)>;

/// Runs blocks 1..L on `x`; after each block listed in the schedule, scores
/// the surviving patches from that block's attention, keeps the selection and
/// drops the rest. Classifies from the final class token.
PrunedResult pruned_forward(TokenMatrix x, const VitModel& model, const PruneSchedule& schedule,
                            const BlockObserver& observer = {});
PrunedResult pruned_forward(const Image& image, const VitModel& model, const PruneSchedule& schedule,
                            const BlockObserver& observer = {});

}  // namespace entroprune
