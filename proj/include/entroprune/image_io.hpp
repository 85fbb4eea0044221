#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace entroprune {

struct ModelConfig;

/// H×W×C float image, interleaved (HWC) row-major.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  double& at(std::size_t y, std::size_t x, std::size_t c) { return data[(y * width + x) * channels + c]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data[(y * width + x) * channels + c];
  }
};

/// Reads a P5 (grayscale) or P6 (RGB) binary PNM with maxval <= 255, or a
/// raw tensor: three u32 LE (H, W, C) followed by H·W·C f32 LE values.
/// 8-bit samples become float(v) / float(maxval), exactly what a raw file
/// holding those f32 values would yield. No normalization is applied.
Image read_image_file(const std::filesystem::path& path);

/// Per-channel (v - mean[c]) / std[c].
void normalize(Image& img, std::span<const double> mean, std::span<const double> std);

/// read_image_file + shape check against the config + normalize.
/// Throws ShapeError when H, W or C do not match the config (no resizing).
Image load_image(const std::filesystem::path& path, const ModelConfig& config);

/// Binary 8-bit PGM (P5), maxval 255.
void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels);
/// Binary 8-bit PPM (P6), maxval 255, interleaved RGB.
void write_ppm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> rgb);
void write_raw_f32(const std::filesystem::path& path, std::size_t height, std::size_t width,
                   std::size_t channels, std::span<const float> values);

}  // namespace entroprune
