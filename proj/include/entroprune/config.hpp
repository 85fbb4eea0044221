#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace entroprune {

/// Geometry and preprocessing constants of a ViT.
///
/// Defaults describe DeiT-S/16 at 224×224 (depth 12, 6 heads, width 384)
/// with ImageNet normalization statistics.
struct ModelConfig {
  std::size_t depth = 12;
  std::size_t heads = 6;
  std::size_t embed_dim = 384;
  std::size_t patch_size = 16;
  std::size_t image_size = 224;
  std::size_t in_chans = 3;
  std::size_t num_classes = 1000;
  std::size_t ffn_ratio = 4;
  double ln_eps = 1e-6;
  std::vector<double> mean = {0.485, 0.456, 0.406};
  std::vector<double> std = {0.229, 0.224, 0.225};

  std::size_t head_dim() const { return embed_dim / heads; }
  std::size_t hidden_dim() const { return ffn_ratio * embed_dim; }
  std::size_t grid_size() const { return image_size / patch_size; }
  std::size_t num_patches() const { return grid_size() * grid_size(); }
  std::size_t num_tokens() const { return num_patches() + 1; }
  std::size_t patch_dim() const { return patch_size * patch_size * in_chans; }

  /// Throws ConfigError when the geometry is inconsistent.
  void validate() const;

  static ModelConfig deit_small() { return {}; }
};

void to_json(nlohmann::json& j, const ModelConfig& c);
/// Missing keys keep their defaults. An explicit "head_dim" must equal embed_dim / heads.
void from_json(const nlohmann::json& j, ModelConfig& c);

ModelConfig load_config(const std::filesystem::path& path);

}  // namespace entroprune
