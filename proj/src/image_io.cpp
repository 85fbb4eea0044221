#include "entroprune/image_io.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <string>

#include "entroprune/config.hpp"
#include "entroprune/errors.hpp"

namespace entroprune {

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open image " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Cursor over a PNM header: whitespace-separated ASCII integers, '#' comments.
class PnmHeader {
 public:
  PnmHeader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  std::size_t next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw FormatError("malformed PNM header");
    }
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1u << 24)) throw FormatError("PNM header value out of range");
    }
    return v;
  }

  /// Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) throw FormatError("malformed PNM header");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
};

Image read_pnm(const std::vector<std::uint8_t>& bytes, std::size_t channels, const std::string& name) {
  PnmHeader header(bytes, 2);
  const std::size_t width = header.next_int();
  const std::size_t height = header.next_int();
  const std::size_t maxval = header.next_int();
  const std::size_t start = header.raster_start();
  if (width == 0 || height == 0) throw FormatError(name + ": zero image dimension");
  if (maxval == 0 || maxval > 255) throw FormatError(name + ": only 8-bit PNM (maxval <= 255) is supported");
  const std::size_t count = width * height * channels;
  if (bytes.size() < start + count) throw FormatError(name + ": truncated raster");

  Image img{height, width, channels, std::vector<double>(count)};
  const float scale = static_cast<float>(maxval);
  for (std::size_t i = 0; i < count; ++i) {
    img.data[i] = static_cast<double>(static_cast<float>(bytes[start + i]) / scale);
  }
  return img;
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

Image read_raw(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  if (bytes.size() < 12) throw FormatError(name + ": truncated raw tensor header");
  const std::size_t h = read_u32_le(bytes.data());
  const std::size_t w = read_u32_le(bytes.data() + 4);
  const std::size_t c = read_u32_le(bytes.data() + 8);
  if (h == 0 || w == 0 || c == 0) throw FormatError(name + ": zero image dimension");
  const std::size_t count = h * w * c;
  if (count > (bytes.size() - 12) / sizeof(float) || bytes.size() - 12 != count * sizeof(float)) {
    throw FormatError(name + ": raw tensor payload does not match its " + std::to_string(h) + "x" +
                      std::to_string(w) + "x" + std::to_string(c) + " header");
  }
  Image img{h, w, c, std::vector<double>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    float v;
    std::memcpy(&v, bytes.data() + 12 + i * sizeof(float), sizeof(float));
    img.data[i] = v;
  }
  return img;
}

void write_pnm(const std::filesystem::path& path, const char* magic, std::size_t width,
               std::size_t height, std::span<const std::uint8_t> pixels) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << magic << '\n' << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

Image read_image_file(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  const std::string name = path.string();
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return read_pnm(bytes, 1, name);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return read_pnm(bytes, 3, name);
  const auto ext = path.extension().string();
  if (ext == ".f32" || ext == ".raw") return read_raw(bytes, name);
  throw FormatError(name + ": unsupported image format (expected P5, P6, or .f32/.raw tensor)");
}

void normalize(Image& img, std::span<const double> mean, std::span<const double> std) {
  if (mean.size() != img.channels || std.size() != img.channels) {
    throw ShapeError("normalization statistics do not match channel count");
  }
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const std::size_t c = i % img.channels;
    img.data[i] = (img.data[i] - mean[c]) / std[c];
  }
}

Image load_image(const std::filesystem::path& path, const ModelConfig& config) {
  Image img = read_image_file(path);
  if (img.height != config.image_size || img.width != config.image_size ||
      img.channels != config.in_chans) {
    throw ShapeError(path.string() + ": image is " + std::to_string(img.height) + "x" +
                     std::to_string(img.width) + "x" + std::to_string(img.channels) + ", model expects " +
                     std::to_string(config.image_size) + "x" + std::to_string(config.image_size) + "x" +
                     std::to_string(config.in_chans));
  }
  normalize(img, config.mean, config.std);
  return img;
}

void write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels) {
  if (pixels.size() != width * height) throw ShapeError("PGM pixel count does not match dimensions");
  write_pnm(path, "P5", width, height, pixels);
}

void write_ppm(const std::filesystem::path& path, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> rgb) {
  if (rgb.size() != width * height * 3) throw ShapeError("PPM sample count does not match dimensions");
  write_pnm(path, "P6", width, height, rgb);
}

void write_raw_f32(const std::filesystem::path& path, std::size_t height, std::size_t width,
                   std::size_t channels, std::span<const float> values) {
  if (values.size() != height * width * channels) throw ShapeError("raw tensor size mismatch");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (std::size_t dim : {height, width, channels}) {
    const auto v = static_cast<std::uint32_t>(dim);
    const char le[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                        static_cast<char>(v >> 24)};
    out.write(le, 4);
  }
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace entroprune
