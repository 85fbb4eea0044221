#include "entroprune/weights.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>

#include <json.hpp>

#include "entroprune/errors.hpp"

namespace entroprune {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes a little-endian host");

namespace {

constexpr std::size_t kPreamble = 16;

std::uint64_t read_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void write_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string shape_str(std::span<const std::size_t> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::uint64_t as_count(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number_unsigned()) throw ParseError(what + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace

std::size_t WeightArchive::Entry::numel() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

WeightArchive WeightArchive::from_bytes(std::vector<std::uint8_t> bytes) {
  if (bytes.size() < kPreamble) throw ParseError("archive shorter than its 16-byte preamble");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ParseError("bad archive magic");
  }
  const std::uint64_t header_len = read_u64_le(bytes.data() + 8);
  if (header_len > bytes.size() - kPreamble) {
    throw ParseError("header length " + std::to_string(header_len) + " exceeds file size");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + kPreamble,
                                   bytes.begin() + kPreamble + static_cast<std::ptrdiff_t>(header_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("archive header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) throw ParseError("archive header must be a JSON object");

  WeightArchive archive;
  archive.payload_start_ = kPreamble + header_len;
  const std::uint64_t payload_size = bytes.size() - archive.payload_start_;

  for (const auto& [name, desc] : header.items()) {
    if (!desc.is_object()) throw ParseError("entry '" + name + "' is not an object");
    for (const char* key : {"dtype", "shape", "offset", "nbytes"}) {
      if (!desc.contains(key)) throw ParseError("entry '" + name + "' lacks '" + key + "'");
    }
    if (desc["dtype"] != "f32") throw ParseError("entry '" + name + "': only dtype f32 is supported");
    if (!desc["shape"].is_array()) throw ParseError("entry '" + name + "': shape must be an array");

    Entry e;
    for (const auto& d : desc["shape"]) e.shape.push_back(as_count(d, "shape of '" + name + "'"));
    e.offset = as_count(desc["offset"], "offset of '" + name + "'");
    e.nbytes = as_count(desc["nbytes"], "nbytes of '" + name + "'");

    if (e.nbytes != e.numel() * sizeof(float)) {
      throw IntegrityError("entry '" + name + "': nbytes " + std::to_string(e.nbytes) +
                           " does not match shape " + shape_str(e.shape));
    }
    if (e.offset % kAlignment != 0) {
      throw IntegrityError("entry '" + name + "': offset " + std::to_string(e.offset) +
                           " is not 64-byte aligned");
    }
    if (e.offset > payload_size || e.nbytes > payload_size - e.offset) {
      throw IntegrityError("entry '" + name + "' extends past the end of the payload");
    }
    archive.entries_.emplace(name, std::move(e));
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
  for (const auto& [name, e] : archive.entries_) {
    if (e.nbytes > 0) spans.emplace_back(e.offset, e.offset + e.nbytes);
  }
  std::sort(spans.begin(), spans.end());
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].first < spans[i - 1].second) throw IntegrityError("archive entries overlap");
  }

  archive.bytes_ = std::move(bytes);
  return archive;
}

const WeightArchive::Entry& WeightArchive::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw NotFoundError("tensor '" + name + "' not found in archive");
  return it->second;
}

std::vector<float> WeightArchive::values(const std::string& name) const {
  const Entry& e = entry(name);
  std::vector<float> out(e.numel());
  std::memcpy(out.data(), bytes_.data() + payload_start_ + e.offset, e.nbytes);
  return out;
}

WeightArchive load_archive(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open archive " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return WeightArchive::from_bytes(std::move(bytes));
}

void store_archive(const WeightArchive& archive, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  const auto bytes = archive.bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

Matrix get_tensor(const WeightArchive& archive, const std::string& name,
                  std::span<const std::size_t> expected_shape) {
  const auto& e = archive.entry(name);
  if (!std::equal(e.shape.begin(), e.shape.end(), expected_shape.begin(), expected_shape.end())) {
    throw ShapeError("tensor '" + name + "' has shape " + shape_str(e.shape) + ", expected " +
                     shape_str(expected_shape));
  }
  if (e.shape.size() > 2) {
    throw ShapeError("tensor '" + name + "' has rank " + std::to_string(e.shape.size()) +
                     "; only rank 1 and 2 convert to Matrix");
  }
  const auto raw = archive.values(name);
  std::vector<double> wide(raw.begin(), raw.end());
  const std::size_t rows = e.shape.size() == 2 ? e.shape[0] : 1;
  const std::size_t cols = e.shape.empty() ? 1 : e.shape.back();
  return Matrix(rows, cols, std::move(wide));
}

Matrix get_tensor(const WeightArchive& archive, const std::string& name,
                  std::initializer_list<std::size_t> expected_shape) {
  return get_tensor(archive, name, std::span<const std::size_t>(expected_shape.begin(), expected_shape.size()));
}

ArchiveBuilder& ArchiveBuilder::add(std::string name, std::vector<std::size_t> shape,
                                    std::vector<float> values) {
  const std::size_t numel =
      std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  if (numel != values.size()) {
    throw ShapeError("tensor '" + name + "': " + std::to_string(values.size()) +
                     " values for shape " + shape_str(shape));
  }
  tensors_[std::move(name)] = Pending{std::move(shape), std::move(values)};
  return *this;
}

ArchiveBuilder& ArchiveBuilder::add(std::string name, const Matrix& m) {
  std::vector<float> narrow(m.data().begin(), m.data().end());
  return add(std::move(name), {m.rows(), m.cols()}, std::move(narrow));
}

std::vector<std::uint8_t> ArchiveBuilder::serialize() const {
  nlohmann::json header = nlohmann::json::object();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors_) {
    const std::uint64_t nbytes = t.values.size() * sizeof(float);
    header[name] = {{"dtype", "f32"}, {"shape", t.shape}, {"offset", offset}, {"nbytes", nbytes}};
    offset += (nbytes + WeightArchive::kAlignment - 1) / WeightArchive::kAlignment * WeightArchive::kAlignment;
  }
  std::string text = header.dump();
  // Pad with spaces so the payload itself starts on an aligned file offset.
  while ((kPreamble + text.size()) % WeightArchive::kAlignment != 0) text.push_back(' ');

  std::vector<std::uint8_t> out(WeightArchive::kMagic.begin(), WeightArchive::kMagic.end());
  write_u64_le(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  const std::size_t payload_start = out.size();
  out.resize(payload_start + offset, 0);
  for (const auto& [name, t] : tensors_) {
    const auto off = header[name]["offset"].get<std::uint64_t>();
    std::memcpy(out.data() + payload_start + off, t.values.data(), t.values.size() * sizeof(float));
  }
  return out;
}

}  // namespace entroprune
