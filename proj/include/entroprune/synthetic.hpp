#pragma once

#include <cstdint>

#include "entroprune/config.hpp"
#include "entroprune/image_io.hpp"
#include "entroprune/weights.hpp"

namespace entroprune {

/// Seeded random weights covering the full canonical naming scheme for
/// `config`. Linear weights are uniform in ±1/sqrt(fan_in), biases and
/// LN shifts in ±0.1, LN scales in 1 ± 0.1, embeddings in ±0.5. The values
/// depend only on the seed (no standard-library distributions involved).
ArchiveBuilder random_weights(const ModelConfig& config, std::uint64_t seed);

/// Un-normalized test image for `config` with pixels uniform in [0, 1).
Image random_image(const ModelConfig& config, std::uint64_t seed);

}  // namespace entroprune
