#include "entroprune/config.hpp"

#include <fstream>

#include "entroprune/errors.hpp"

namespace entroprune {

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(depth >= 1 && heads >= 1 && embed_dim >= 1 && patch_size >= 1 && image_size >= 1 &&
              in_chans >= 1 && num_classes >= 1 && ffn_ratio >= 1,
          "all model dimensions must be >= 1");
  require(embed_dim % heads == 0, "embed_dim must be divisible by heads");
  require(image_size % patch_size == 0, "image_size must be divisible by patch_size");
  require(mean.size() == in_chans && std.size() == in_chans,
          "mean/std must have one entry per input channel");
  for (double s : std) require(s > 0.0, "normalization std must be positive");
  require(ln_eps >= 0.0, "ln_eps must be non-negative");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"depth", c.depth},           {"heads", c.heads},
                     {"embed_dim", c.embed_dim},   {"head_dim", c.head_dim()},
                     {"patch_size", c.patch_size}, {"image_size", c.image_size},
                     {"in_chans", c.in_chans},     {"num_classes", c.num_classes},
                     {"ffn_ratio", c.ffn_ratio},   {"ln_eps", c.ln_eps},
                     {"mean", c.mean},             {"std", c.std}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  try {
    c.depth = j.value("depth", c.depth);
    c.heads = j.value("heads", c.heads);
    c.embed_dim = j.value("embed_dim", c.embed_dim);
    c.patch_size = j.value("patch_size", c.patch_size);
    c.image_size = j.value("image_size", c.image_size);
    c.in_chans = j.value("in_chans", c.in_chans);
    c.num_classes = j.value("num_classes", c.num_classes);
    c.ffn_ratio = j.value("ffn_ratio", c.ffn_ratio);
    c.ln_eps = j.value("ln_eps", c.ln_eps);
    c.mean = j.value("mean", c.mean);
    c.std = j.value("std", c.std);
    if (j.contains("head_dim") && c.heads != 0 &&
        j["head_dim"].get<std::size_t>() * c.heads != c.embed_dim) {
      throw ConfigError("head_dim * heads must equal embed_dim");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  ModelConfig c = j.get<ModelConfig>();
  c.validate();
  return c;
}

}  // namespace entroprune
