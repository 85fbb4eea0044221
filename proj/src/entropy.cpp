#include "entroprune/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "entroprune/errors.hpp"

namespace entroprune {

namespace {

void require_patches(const AttentionTensor& a) {
  if (a.num_heads() == 0) throw ShapeError("attention tensor has no heads");
  if (a.tokens() < 2) throw ShapeError("scoring needs at least one patch token");
}

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

std::string format_alpha(double alpha) {
  std::ostringstream os;
  os << alpha;
  return os.str();
}

}  // namespace

Criterion Criterion::renyi(double alpha) {
  Criterion c{Kind::renyi, alpha, 0};
  c.validate();
  return c;
}

std::string Criterion::name() const {
  switch (kind) {
    case Kind::shannon: return "shannon";
    case Kind::renyi: return "renyi";
    case Kind::evit: return "evit";
    case Kind::random: return "random";
  }
  return "unknown";
}

std::string Criterion::label() const {
  return kind == Kind::renyi ? "renyi(a=" + format_alpha(alpha) + ")" : name();
}

void Criterion::validate() const {
  if (kind == Kind::renyi && (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha))) {
    throw InvalidOrderError("Renyi order must be positive and != 1, got " + format_alpha(alpha));
  }
}

Criterion parse_criterion(const std::string& text, double default_alpha, std::uint64_t seed) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (head == "renyi") {
    double alpha = default_alpha;
    if (colon != std::string::npos) {
      try {
        std::size_t used = 0;
        alpha = std::stod(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ConfigError("bad Renyi order in '" + text + "'");
      }
    }
    try {
      return Criterion::renyi(alpha);
    } catch (const InvalidOrderError& e) {
      throw ConfigError(e.what());
    }
  }
  if (colon == std::string::npos) {
    if (head == "shannon") return Criterion::shannon();
    if (head == "evit") return Criterion::evit();
    if (head == "random") return Criterion::random(seed);
  }
  throw ConfigError("unknown criterion '" + text + "' (expected shannon, renyi[:alpha], evit, random)");
}

std::vector<double> patch_attention_distribution(const AttentionTensor& a, std::size_t head,
                                                 std::size_t query_patch, const ScoringOptions& opts) {
  require_patches(a);
  if (head >= a.num_heads()) throw IndexError("head index out of range");
  const std::size_t n = a.tokens();
  if (query_patch + 1 >= n) throw IndexError("query patch index out of range");

  auto row = a.heads[head].row(query_patch + 1);
  if (opts.include_class_key) return {row.begin(), row.end()};

  double mass = 0.0;
  for (std::size_t j = 1; j < n; ++j) mass += row[j];
  if (!(mass >= kDegenerateMass)) {
    throw DegenerateDistributionError("patch " + std::to_string(query_patch) + " in head " +
                                      std::to_string(head) + " puts no attention mass on patch keys");
  }
  std::vector<double> dist(row.begin() + 1, row.end());
  for (double& p : dist) p /= mass;
  return dist;
}

// Terms are summed in ascending order, which makes both entropies exactly
// invariant under permutations of the distribution.
double shannon_entropy(std::span<const double> dist) {
  std::vector<double> terms;
  terms.reserve(dist.size());
  for (double p : dist) {
    if (p > 0.0) terms.push_back(-p * std::log(p));
  }
  return sorted_sum(terms);
}

double renyi_entropy(std::span<const double> dist, double alpha) {
  if (!(alpha > 0.0) || alpha == 1.0 || !std::isfinite(alpha)) {
    throw InvalidOrderError("Renyi order must be positive and != 1");
  }
  std::vector<double> logs;
  logs.reserve(dist.size());
  for (double p : dist) {
    if (p > 0.0) logs.push_back(alpha * std::log(p));
  }
  if (logs.empty()) return 0.0;
  const double peak = *std::max_element(logs.begin(), logs.end());
  for (double& v : logs) v = std::exp(v - peak);
  return (peak + std::log(sorted_sum(logs))) / (1.0 - alpha);
}

double criterion_entropy(std::span<const double> dist, const Criterion& criterion) {
  switch (criterion.kind) {
    case Criterion::Kind::shannon: return shannon_entropy(dist);
    case Criterion::Kind::renyi: return renyi_entropy(dist, criterion.alpha);
    default: throw ConfigError("criterion '" + criterion.name() + "' is not an entropy");
  }
}

EntropyScores head_averaged_scores(const AttentionTensor& a, const Criterion& criterion, std::size_t block,
                                   const ScoringOptions& opts) {
  criterion.validate();
  require_patches(a);
  const std::size_t patches = a.tokens() - 1;

  if (criterion.kind == Criterion::Kind::evit) {
    EntropyScores s = evit_cls_score(a);
    s.block = block;
    return s;
  }
  if (criterion.kind == Criterion::Kind::random) {
    // Distinct streams per block so successive pruning events are independent.
    return {random_scores(patches, criterion.seed ^ (0x9E3779B97F4A7C15ULL * (block + 1))), criterion, block};
  }

  EntropyScores s{std::vector<double>(patches, 0.0), criterion, block};
  for (std::size_t h = 0; h < a.num_heads(); ++h) {
    for (std::size_t i = 0; i < patches; ++i) {
      try {
        s.values[i] += criterion_entropy(patch_attention_distribution(a, h, i, opts), criterion);
      } catch (const DegenerateDistributionError& e) {
        throw DegenerateDistributionError("block " + std::to_string(block) + ": " + e.what());
      }
    }
  }
  const double heads = static_cast<double>(a.num_heads());
  for (double& v : s.values) v /= heads;
  return s;
}

EntropyScores evit_cls_score(const AttentionTensor& a) {
  require_patches(a);
  const std::size_t n = a.tokens();
  EntropyScores s{std::vector<double>(n - 1, 0.0), Criterion::evit(), 0};
  for (const auto& head : a.heads) {
    for (std::size_t j = 1; j < n; ++j) s.values[j - 1] += head(0, j);
  }
  const double heads = static_cast<double>(a.num_heads());
  for (double& v : s.values) v /= heads;
  return s;
}

std::vector<double> random_scores(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  // 53 random mantissa bits; independent of the standard library's distributions.
  for (double& v : out) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

std::vector<double> attention_distance(const AttentionTensor& a, std::span<const std::size_t> patch_ids,
                                       std::size_t grid_width, std::size_t patch_size) {
  require_patches(a);
  const std::size_t patches = a.tokens() - 1;
  if (patch_ids.size() != patches) throw ShapeError("patch_ids length does not match attention size");
  if (grid_width == 0) throw ShapeError("grid width must be positive");

  auto coord = [&](std::size_t idx) {
    return std::pair<double, double>(static_cast<double>(patch_ids[idx] / grid_width),
                                     static_cast<double>(patch_ids[idx] % grid_width));
  };

  std::vector<double> out;
  out.reserve(a.num_heads());
  for (const auto& head : a.heads) {
    double total = 0.0;
    std::size_t queries = 0;
    for (std::size_t i = 0; i < patches; ++i) {
      auto row = head.row(i + 1);
      double mass = 0.0;
      for (std::size_t j = 1; j <= patches; ++j) mass += row[j];
      if (!(mass >= kDegenerateMass)) continue;
      const auto [qy, qx] = coord(i);
      double dist = 0.0;
      for (std::size_t j = 0; j < patches; ++j) {
        const auto [ky, kx] = coord(j);
        dist += row[j + 1] / mass * std::hypot(qy - ky, qx - kx);
      }
      total += dist;
      ++queries;
    }
    out.push_back(queries ? total / static_cast<double>(queries) * static_cast<double>(patch_size) : 0.0);
  }
  return out;
}

}  // namespace entroprune
