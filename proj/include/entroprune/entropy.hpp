#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entroprune/vit.hpp"

namespace entroprune {

/// How patches are scored.
///
/// Entropy criteria treat LOW scores as important (concentrated attention);
/// `evit` scores by how much the class token attends to a patch and treats
/// HIGH scores as important; `random` draws seeded uniform scores.
struct Criterion {
  enum class Kind { shannon, renyi, evit, random };

  Kind kind = Kind::shannon;
  double alpha = 1.0;       // Rényi order, used when kind == renyi
  std::uint64_t seed = 0;   // used when kind == random

  static Criterion shannon() { return {Kind::shannon, 1.0, 0}; }
  /// Throws InvalidOrderError unless alpha > 0 and alpha != 1.
  static Criterion renyi(double alpha);
  static Criterion evit() { return {Kind::evit, 1.0, 0}; }
  static Criterion random(std::uint64_t seed) { return {Kind::random, 1.0, seed}; }

  bool is_entropy() const { return kind == Kind::shannon || kind == Kind::renyi; }
  bool higher_is_important() const { return kind == Kind::evit; }

  /// "shannon", "renyi", "evit", "random".
  std::string name() const;
  /// Stable label used in tables and JSON, e.g. "renyi(a=5)".
  std::string label() const;

  void validate() const;
};

/// Parses "shannon", "evit", "random", "renyi" (order taken from
/// `default_alpha`) or "renyi:<alpha>". Throws ConfigError on anything else.
Criterion parse_criterion(const std::string& text, double default_alpha = 2.0, std::uint64_t seed = 0);

/// Per-patch scores of one block, in the order of the block's surviving patches.
struct EntropyScores {
  std::vector<double> values;
  Criterion criterion;
  std::size_t block = 0;  // 1-based; 0 when not tied to a block

  bool higher_is_important() const { return criterion.higher_is_important(); }
};

struct ScoringOptions {
  /// Keep the class key in each patch's distribution (length n, no
  /// renormalization) instead of restricting to patch keys. Ablation only.
  bool include_class_key = false;
};

/// Restricted-mass threshold below which a patch distribution is degenerate.
inline constexpr double kDegenerateMass = 1e-12;

/// Attention row of patch `query_patch` (0-based among surviving patches) in
/// `head`, restricted to patch keys and renormalized to sum to one.
/// Throws DegenerateDistributionError when the restricted mass is < 1e-12.
std::vector<double> patch_attention_distribution(const AttentionTensor& a, std::size_t head,
                                                 std::size_t query_patch, const ScoringOptions& opts = {});

/// -Σ p log p in nats, with 0 log 0 = 0.
double shannon_entropy(std::span<const double> dist);

/// log(Σ p^α) / (1 - α) in nats, evaluated as a log-sum-exp over α·log p
/// for the nonzero entries. Throws InvalidOrderError for α <= 0 or α == 1.
double renyi_entropy(std::span<const double> dist, double alpha);

/// Entropy of `dist` under an entropy criterion (Shannon or Rényi).
double criterion_entropy(std::span<const double> dist, const Criterion& criterion);

/// Per-patch importance for one block. Entropy criteria: per-head entropy of
/// each patch distribution, averaged over heads. evit and random delegate to
/// evit_cls_score / random_scores (the latter seeded by criterion.seed and block).
EntropyScores head_averaged_scores(const AttentionTensor& a, const Criterion& criterion,
                                   std::size_t block = 0, const ScoringOptions& opts = {});

/// Class-token row averaged over heads, restricted to patch keys (not renormalized).
EntropyScores evit_cls_score(const AttentionTensor& a);

/// `count` reproducible uniform [0, 1) scores.
std::vector<double> random_scores(std::size_t count, std::uint64_t seed);

/// Mean attention distance per head, in pixels.
///
/// For every surviving query patch the patch attention distribution
/// (class key excluded, renormalized) weights the Euclidean distance to each
/// key patch; distances are measured between grid cells and scaled by
/// `patch_size`. The per-query means are averaged over query patches.
/// Queries with no attention mass on patches are skipped.
std::vector<double> attention_distance(const AttentionTensor& a, std::span<const std::size_t> patch_ids,
                                       std::size_t grid_width, std::size_t patch_size);

}  // namespace entroprune
