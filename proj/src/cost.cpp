#include "entroprune/cost.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <thread>

#include "entroprune/errors.hpp"

namespace entroprune {

namespace {

std::uint64_t ffn_flops(std::uint64_t n, std::uint64_t d, std::uint64_t ratio) { return 2 * ratio * n * d * d; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

std::uint64_t block_flops(std::size_t n, std::size_t d, std::size_t ffn_ratio) {
  const std::uint64_t N = n, D = d;
  return 4 * N * D * D + 2 * N * N * D + ffn_flops(N, D, ffn_ratio);
}

std::vector<std::size_t> token_trajectory(const ModelConfig& config, const PruneSchedule& schedule) {
  schedule.validate(config);
  std::vector<std::size_t> tokens;
  std::size_t patches = config.num_patches();
  for (std::size_t block = 1; block <= config.depth; ++block) {
    tokens.push_back(patches + 1);
    if (schedule.blocks.contains(block)) patches = keep_count(schedule.keep_rate, patches);
  }
  return tokens;
}

FlopsReport model_flops(const ModelConfig& config, const PruneSchedule& schedule) {
  config.validate();
  const std::size_t d = config.embed_dim, r = config.ffn_ratio;

  FlopsReport rep;
  rep.block_tokens = token_trajectory(config, schedule);
  rep.embed_flops = std::uint64_t{config.num_patches()} * d * config.patch_dim();
  rep.head_flops = std::uint64_t{d} * config.num_classes;

  rep.total = rep.embed_flops + rep.head_flops;
  rep.mid_block_total = rep.total;
  for (std::size_t i = 0; i < rep.block_tokens.size(); ++i) {
    const std::size_t n = rep.block_tokens[i];
    rep.block_flops.push_back(block_flops(n, d, r));
    rep.total += rep.block_flops.back();

    // Mid-block variant: the FFN of a pruning block sees the next block's count.
    const std::size_t ffn_tokens =
        schedule.blocks.contains(i + 1) && i + 1 < rep.block_tokens.size() ? rep.block_tokens[i + 1] : n;
    rep.mid_block_total += rep.block_flops.back() - ffn_flops(n, d, r) + ffn_flops(ffn_tokens, d, r);
  }
  rep.dense_total = rep.embed_flops + rep.head_flops;
  for (std::size_t i = 0; i < config.depth; ++i) rep.dense_total += block_flops(config.num_tokens(), d, r);
  rep.reduction = 1.0 - static_cast<double>(rep.total) / static_cast<double>(rep.dense_total);
  rep.mid_block_reduction = 1.0 - static_cast<double>(rep.mid_block_total) / static_cast<double>(rep.dense_total);
  return rep;
}

nlohmann::json to_json(const FlopsReport& r) {
  return {{"block_tokens", r.block_tokens},
          {"block_flops", r.block_flops},
          {"embed_flops", r.embed_flops},
          {"head_flops", r.head_flops},
          {"total", r.total},
          {"dense_total", r.dense_total},
          {"reduction", r.reduction},
          {"mid_block_total", r.mid_block_total},
          {"mid_block_reduction", r.mid_block_reduction}};
}

std::string format_table(const FlopsReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-8s %8s %16s\n", "block", "tokens", "flops");
  out += line;
  for (std::size_t i = 0; i < r.block_flops.size(); ++i) {
    std::snprintf(line, sizeof line, "%-8zu %8zu %16llu\n", i + 1, r.block_tokens[i],
                  static_cast<unsigned long long>(r.block_flops[i]));
    out += line;
  }
  auto row = [&](const char* name, std::uint64_t v) {
    std::snprintf(line, sizeof line, "%-17s %16llu\n", name, static_cast<unsigned long long>(v));
    out += line;
  };
  row("embed", r.embed_flops);
  row("head", r.head_flops);
  row("total", r.total);
  row("dense_total", r.dense_total);
  std::snprintf(line, sizeof line, "%-17s %15.2f%%\n", "reduction", 100.0 * r.reduction);
  out += line;
  std::snprintf(line, sizeof line, "%-17s %15.2f%%\n", "mid_block", 100.0 * r.mid_block_reduction);
  out += line;
  return out;
}

ThroughputReport benchmark(const VitModel& model, const PruneSchedule& schedule,
                           std::span<const double> keep_rates, std::span<const Image> images,
                           std::size_t warmup, std::size_t batches, std::size_t threads) {
  if (images.empty()) throw EmptyInputError("benchmark needs at least one image");
  batches = std::max<std::size_t>(batches, 1);

  std::vector<PruneSchedule> configs{PruneSchedule::dense()};
  for (double r : keep_rates) {
    PruneSchedule s = schedule;
    s.keep_rate = r;
    s.validate(model.config);
    configs.push_back(s);
  }

  threads = std::clamp<std::size_t>(threads, 1, images.size());
  auto run = [&](const PruneSchedule& s) {
    std::vector<double> sinks(threads, 0.0);
    auto work = [&](std::size_t t) {
      for (std::size_t i = t; i < images.size(); i += threads) {
        sinks[t] += pruned_forward(images[i], model, s).probabilities.front();
      }
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    return std::accumulate(sinks.begin(), sinks.end(), 0.0);
  };

  volatile double sink = 0.0;
  for (std::size_t w = 0; w < warmup; ++w)
    for (const auto& s : configs) sink = sink + run(s);

  std::vector<std::vector<double>> rates(configs.size());
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const auto start = std::chrono::steady_clock::now();
      sink = sink + run(configs[c]);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      rates[c].push_back(static_cast<double>(images.size()) / elapsed.count());
    }
  }

  ThroughputReport rep;
  rep.dense_images_per_second = median(rates[0]);
  for (std::size_t i = 0; i < keep_rates.size(); ++i) {
    const double ips = median(rates[i + 1]);
    rep.rows.push_back({keep_rates[i], ips, ips / rep.dense_images_per_second});
  }
  return rep;
}

nlohmann::json to_json(const ThroughputReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"keep_rate", row.keep_rate},
                    {"images_per_second", row.images_per_second},
                    {"ratio_vs_dense", row.ratio_vs_dense}});
  }
  return {{"dense_images_per_second", r.dense_images_per_second}, {"rows", std::move(rows)}};
}

std::string format_table(const ThroughputReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %14s %10s\n", "keep_rate", "images/s", "ratio");
  out += line;
  std::snprintf(line, sizeof line, "%-10s %14.3f %10.3f\n", "dense", r.dense_images_per_second, 1.0);
  out += line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-10.2f %14.3f %10.3f\n", row.keep_rate, row.images_per_second,
                  row.ratio_vs_dense);
    out += line;
  }
  return out;
}

}  // namespace entroprune
