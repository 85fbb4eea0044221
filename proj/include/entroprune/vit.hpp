#pragma once

#include <cstddef>
#include <vector>

#include "entroprune/config.hpp"
#include "entroprune/image_io.hpp"
#include "entroprune/matrix.hpp"
#include "entroprune/weights.hpp"

namespace entroprune {

/// The d×n token matrix of one image, stored token-contiguous: row t of
/// `tokens` is column t of the d×n matrix. Row 0 is the class token; row
/// t >= 1 is the patch whose original grid index is patch_ids[t - 1].
struct TokenMatrix {
  Matrix tokens;
  std::vector<std::size_t> patch_ids;

  std::size_t count() const { return tokens.rows(); }
  std::size_t dim() const { return tokens.cols(); }
  std::size_t patch_count() const { return patch_ids.size(); }
};

/// Per-head n×n attention; row i is the distribution of query token i over
/// all key tokens.
struct AttentionTensor {
  std::vector<Matrix> heads;

  std::size_t num_heads() const { return heads.size(); }
  std::size_t tokens() const { return heads.empty() ? 0 : heads.front().rows(); }
};

/// Weights of one pre-norm transformer block. Projection matrices are held
/// input-major (d_in × d_out) so a linear layer is x · W + b. Head k of the
/// Q/K/V projections owns output columns [k·d', (k+1)·d').
struct BlockParams {
  std::vector<double> ln1_gamma, ln1_beta;
  Matrix wq, wk, wv, wo;
  std::vector<double> bq, bk, bv, bo;
  std::vector<double> ln2_gamma, ln2_beta;
  Matrix fc1, fc2;
  std::vector<double> fc1_bias, fc2_bias;

  /// Zero projections, zero biases, unit LN scale.
  static BlockParams zeros(const ModelConfig& config);
};

/// All parameters of a ViT classifier, widened to 64-bit.
struct VitModel {
  ModelConfig config;
  Matrix patch_weight;  // patch_dim × d
  std::vector<double> patch_bias;
  Matrix pos_embed;  // num_tokens × d
  std::vector<double> cls_token;
  std::vector<BlockParams> blocks;
  std::vector<double> norm_gamma, norm_beta;
  Matrix head_weight;  // d × num_classes
  std::vector<double> head_bias;

  /// Reads every tensor of the canonical naming scheme with shape checks:
  ///   patch_embed.{weight [d, p·p·C], bias [d]}, pos_embed [n, d], cls_token [1, d],
  ///   blocks.{i}.{ln1,ln2}.{gamma,beta} [d],
  ///   blocks.{i}.attn.{wq,wk,wv,wo}.{weight [d, d], bias [d]},
  ///   blocks.{i}.ffn.fc1.{weight [r·d, d], bias [r·d]}, blocks.{i}.ffn.fc2.{weight [d, r·d], bias [d]},
  ///   norm.{gamma,beta} [d], head.{weight [classes, d], bias [classes]}.
  /// Linear weights are stored output-major as in PyTorch. The patch
  /// projection consumes patches flattened in (row, col, channel) order.
  static VitModel load(const WeightArchive& archive, const ModelConfig& config);
};

struct BlockOutput {
  TokenMatrix tokens;
  AttentionTensor attention;
};

/// Splits an H×W×C image into (H/p)·(W/p) patches in row-major grid order;
/// each patch is flattened as (row, col, channel). Returns one patch per row.
Matrix patchify(const Image& image, std::size_t patch_size);

/// Patch projection + positional embedding, class token prepended.
TokenMatrix embed_tokens(const Matrix& patches, const VitModel& model);

/// Softmax(q_i · k_j / sqrt(d')) per head for the given (already normalized)
/// tokens. Query i indexes rows, key j columns.
AttentionTensor attention_weights(const TokenMatrix& x, const BlockParams& params,
                                  const ModelConfig& config);

/// u = x + MHSA(LN1(x)); out = u + FFN(LN2(u)). The returned attention is
/// the one computed on LN1(x) inside this block.
BlockOutput block_forward(const TokenMatrix& x, const BlockParams& params, const ModelConfig& config);

/// Final LN, linear head on the class token, softmax.
std::vector<double> classify(const TokenMatrix& x, const VitModel& model);

/// patchify → embed → all blocks → classify, with no pruning.
std::vector<double> dense_forward(const Image& image, const VitModel& model);

}  // namespace entroprune
