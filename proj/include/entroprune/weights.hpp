#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "entroprune/matrix.hpp"

namespace entroprune {

/// Named-tensor archive.
///
/// File layout (all integers little-endian):
///
///     bytes 0..7    magic "ENTPRUN1"
///     bytes 8..15   u64 header length H
///     bytes 16..    H bytes of UTF-8 JSON:
///                   { "<name>": {"dtype": "f32", "shape": [..], "offset": o, "nbytes": b}, ... }
///     then          payload; offsets are relative to the payload start
///
/// Offsets are 64-byte aligned, nbytes = prod(shape) * 4, entries never overlap.
/// The archive keeps the header text and payload bytes verbatim so that
/// `store_archive(load_archive(p))` reproduces the input file byte for byte.
class WeightArchive {
 public:
  struct Entry {
    std::vector<std::size_t> shape;
    std::uint64_t offset = 0;
    std::uint64_t nbytes = 0;

    std::size_t numel() const;
  };

  static constexpr std::string_view kMagic = "ENTPRUN1";
  static constexpr std::uint64_t kAlignment = 64;

  /// Parses and validates an archive image held in memory.
  static WeightArchive from_bytes(std::vector<std::uint8_t> bytes);

  const std::map<std::string, Entry>& entries() const { return entries_; }
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const Entry& entry(const std::string& name) const;

  /// Raw f32 values of a tensor, shape-agnostic.
  std::vector<float> values(const std::string& name) const;

  /// Whole file image (magic, header, payload).
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t payload_start_ = 0;
  std::map<std::string, Entry> entries_;
};

WeightArchive load_archive(const std::filesystem::path& path);
void store_archive(const WeightArchive& archive, const std::filesystem::path& path);

/// Reads a tensor widened to 64-bit. Rank-1 tensors map to a 1×N matrix,
/// rank-2 tensors to rows×cols. `expected_shape` must match the stored shape
/// exactly; mismatches raise ShapeError, absent names NotFoundError.
Matrix get_tensor(const WeightArchive& archive, const std::string& name,
                  std::span<const std::size_t> expected_shape);
Matrix get_tensor(const WeightArchive& archive, const std::string& name,
                  std::initializer_list<std::size_t> expected_shape);

/// Accumulates named f32 tensors and serializes them in canonical form
/// (sorted names, compact JSON header padded so the payload starts 64-byte aligned).
class ArchiveBuilder {
 public:
  ArchiveBuilder& add(std::string name, std::vector<std::size_t> shape, std::vector<float> values);
  ArchiveBuilder& add(std::string name, const Matrix& m);

  std::vector<std::uint8_t> serialize() const;
  WeightArchive build() const { return WeightArchive::from_bytes(serialize()); }

 private:
  struct Pending {
    std::vector<std::size_t> shape;
    std::vector<float> values;
  };
  std::map<std::string, Pending> tensors_;
};

}  // namespace entroprune
