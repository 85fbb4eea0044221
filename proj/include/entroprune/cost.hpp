#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "entroprune/pruning.hpp"

namespace entroprune {

// FLOP convention: one multiply-add counts as one FLOP. LayerNorm, softmax,
// GELU and bias additions are not counted.

/// 4·n·d² (Q, K, V, output projections) + 2·n²·d (scores and weighted
/// values) + 2·ratio·n·d² (FFN).
std::uint64_t block_flops(std::size_t n, std::size_t d, std::size_t ffn_ratio);

/// Token count entering each block when pruning happens after the listed blocks.
std::vector<std::size_t> token_trajectory(const ModelConfig& config, const PruneSchedule& schedule);

struct FlopsReport {
  std::vector<std::size_t> block_tokens;  // tokens active in each block
  std::vector<std::uint64_t> block_flops;
  std::uint64_t embed_flops = 0;
  std::uint64_t head_flops = 0;
  std::uint64_t total = 0;
  std::uint64_t dense_total = 0;
  double reduction = 0.0;  // 1 - total / dense_total

  /// Alternative accounting where a pruning block's FFN already runs on the
  /// kept tokens (selection between MHSA and FFN). Reported for comparison.
  std::uint64_t mid_block_total = 0;
  double mid_block_reduction = 0.0;
};

/// Throws ConfigError for schedules invalid under `config`.
FlopsReport model_flops(const ModelConfig& config, const PruneSchedule& schedule);

nlohmann::json to_json(const FlopsReport& report);
/// Aligned text table: one row per block, then embed/head/total lines.
std::string format_table(const FlopsReport& report);

struct ThroughputRow {
  double keep_rate = 1.0;
  double images_per_second = 0.0;
  double ratio_vs_dense = 1.0;
};

struct ThroughputReport {
  double dense_images_per_second = 0.0;
  std::vector<ThroughputRow> rows;
};

/// Times dense inference and pruned inference at every keep rate in
/// `keep_rates` (same blocks and criterion as `schedule`). After `warmup`
/// untimed passes over `images`, runs `batches` rounds; every round times one
/// pass over all images for each configuration, interleaved. Reports the
/// median images/second per configuration. With threads > 1 the images of a
/// pass are split across that many worker threads.
ThroughputReport benchmark(const VitModel& model, const PruneSchedule& schedule,
                           std::span<const double> keep_rates, std::span<const Image> images,
                           std::size_t warmup, std::size_t batches, std::size_t threads = 1);

nlohmann::json to_json(const ThroughputReport& report);
std::string format_table(const ThroughputReport& report);

}  // namespace entroprune
