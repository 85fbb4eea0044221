#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "entroprune/config.hpp"
#include "entroprune/cost.hpp"
#include "entroprune/entropy.hpp"
#include "entroprune/errors.hpp"
#include "entroprune/image_io.hpp"
#include "entroprune/pruning.hpp"
#include "entroprune/synthetic.hpp"
#include "entroprune/trace_json.hpp"
#include "entroprune/vit.hpp"
#include "entroprune/weights.hpp"

namespace entroprune::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static auto log = [] {
    auto l = spdlog::stderr_color_mt("entroprune");
    l->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("ENTROPRUNE_LOG")) l->set_level(spdlog::level::from_str(env));
    return l;
  }();
  return log;
}

/// Everything a model-driven command needs: where the weights and inputs
/// live, the geometry, the pruning schedule and the seed.
struct RunManifest {
  std::string archive;
  std::string config_path;
  ModelConfig config;
  PruneSchedule schedule;
  std::vector<std::string> inputs;
  std::string out_dir;
  std::uint64_t seed = 0;
};

struct ManifestFlags {
  std::string archive;
  std::string config;
  double keep_rate = 1.0;
  std::optional<std::string> blocks;  // unset: the default schedule clipped to the depth
  std::string criterion = "shannon";
  double alpha = 2.0;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t threads = 1;
  bool include_class_key = false;
  std::vector<std::string> inputs;
};

void add_model_flags(CLI::App* cmd, ManifestFlags& f, bool need_archive, bool want_inputs) {
  auto* a = cmd->add_option("--archive", f.archive, "Weight archive (ENTPRUN1 format)");
  if (need_archive) a->required();
  cmd->add_option("--config", f.config, "JSON model config (defaults to DeiT-S/16, 224px)");
  cmd->add_option("--keep-rate", f.keep_rate, "Fraction of patches kept at each pruning block")
      ->capture_default_str();
  cmd->add_option("--blocks", f.blocks,
                  "Comma-separated 1-based pruning blocks (empty: none; default 4,7,10 up to the depth)");
  cmd->add_option("--criterion", f.criterion, "shannon | renyi[:alpha] | evit | random")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Renyi order when --criterion renyi has none")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for the random criterion and synthetic data")->capture_default_str();
  cmd->add_option("--out-dir", f.out_dir, "Directory for output files");
  cmd->add_option("--threads", f.threads, "Worker threads over input images")->capture_default_str();
  cmd->add_flag("--include-class-key", f.include_class_key,
                "Ablation: keep the class-token key in patch attention distributions");
  if (want_inputs) cmd->add_option("inputs", f.inputs, "Images: P5/P6 PNM or .f32 raw tensors");
}

std::set<std::size_t> parse_blocks(const std::string& text) {
  std::set<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.insert(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ConfigError("bad block index '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_rates(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad keep rate '" + item + "'");
    }
    if (!(out.back() > 0.0 && out.back() <= 1.0)) throw ConfigError("keep rate " + item + " outside (0, 1]");
  }
  if (out.empty()) throw ConfigError("empty keep-rate list");
  return out;
}

RunManifest make_manifest(const ManifestFlags& f) {
  RunManifest m;
  m.archive = f.archive;
  m.config_path = f.config;
  m.config = f.config.empty() ? ModelConfig::deit_small() : load_config(f.config);
  m.config.validate();
  if (f.blocks) {
    m.schedule.blocks = parse_blocks(*f.blocks);
  } else {
    std::erase_if(m.schedule.blocks, [&](std::size_t b) { return b > m.config.depth; });
  }
  m.schedule.keep_rate = f.keep_rate;
  m.schedule.criterion = parse_criterion(f.criterion, f.alpha, f.seed);
  m.schedule.scoring.include_class_key = f.include_class_key;
  m.schedule.validate(m.config);
  m.inputs = f.inputs;
  m.out_dir = f.out_dir;
  m.seed = f.seed;
  if (!m.out_dir.empty()) fs::create_directories(m.out_dir);
  return m;
}

VitModel load_model(const RunManifest& m) {
  logger()->info("loading archive {}", m.archive);
  return VitModel::load(load_archive(m.archive), m.config);
}

/// Applies `fn` to every input on up to `threads` workers; results come back
/// in input order.
template <typename Result>
std::vector<Result> map_inputs(const std::vector<std::string>& inputs, std::size_t threads,
                               const std::function<Result(const std::string&)>& fn) {
  std::vector<Result> results(inputs.size());
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(inputs.size(), 1));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) results[i] = fn(inputs[i]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<std::size_t> top_k(const std::vector<double>& probs, std::size_t k) {
  std::vector<std::size_t> idx(probs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return probs[a] != probs[b] ? probs[a] > probs[b] : a < b; });
  idx.resize(k);
  return idx;
}

struct ItemResult {
  json record;
  bool ok = false;
};

/// Writes JSON lines to <out_dir>/<name> when an output directory is set,
/// otherwise to `out`.
void emit_lines(const RunManifest& m, const std::string& name, const std::vector<ItemResult>& items,
                std::ostream& out) {
  std::ofstream file;
  std::ostream* dst = &out;
  if (!m.out_dir.empty()) {
    file.open(fs::path(m.out_dir) / name, std::ios::trunc);
    if (!file) throw Error("cannot write " + (fs::path(m.out_dir) / name).string());
    dst = &file;
  }
  for (const auto& item : items) *dst << item.record.dump() << '\n';
}

int item_exit_code(const std::vector<ItemResult>& items) {
  return std::all_of(items.begin(), items.end(), [](const ItemResult& r) { return r.ok; }) ? kExitOk
                                                                                          : kExitItemFailure;
}

ItemResult error_record(const std::string& path, const std::exception& e) {
  logger()->error("{}: {}", path, e.what());
  return {json{{"path", path}, {"error", e.what()}}, false};
}

// ---------------------------------------------------------------------------
// classify

int cmd_classify(const ManifestFlags& f, std::size_t k, bool with_trace, std::ostream& out) {
  const RunManifest m = make_manifest(f);
  const VitModel model = load_model(m);
  auto items = map_inputs<ItemResult>(m.inputs, f.threads, [&](const std::string& path) {
    try {
      const Image img = load_image(path, m.config);
      const PrunedResult r = pruned_forward(img, model, m.schedule);
      const auto best = top_k(r.probabilities, k);
      std::vector<double> best_probs;
      for (std::size_t i : best) best_probs.push_back(r.probabilities[i]);
      json rec = {{"path", path},
                  {"top_k", best},
                  {"top_k_probs", best_probs},
                  {"probabilities", r.probabilities},
                  {"trajectory", r.trace.trajectory()}};
      if (with_trace) rec["trace"] = to_json(r.trace);
      return ItemResult{std::move(rec), true};
    } catch (const std::exception& e) {
      return error_record(path, e);
    }
  });
  emit_lines(m, "classify.jsonl", items, out);
  return item_exit_code(items);
}

// ---------------------------------------------------------------------------
// entropy-map

int cmd_entropy_map(const ManifestFlags& f, std::size_t block, std::optional<double> map_alpha, std::ostream& out) {
  const RunManifest m = make_manifest(f);
  if (m.out_dir.empty()) throw ConfigError("entropy-map needs --out-dir");
  if (block < 1 || block > m.config.depth) {
    throw ConfigError("block " + std::to_string(block) + " outside 1.." + std::to_string(m.config.depth));
  }
  const Criterion map_criterion =
      map_alpha && *map_alpha != 1.0 ? parse_criterion("renyi:" + std::to_string(*map_alpha)) : Criterion::shannon();
  const VitModel model = load_model(m);
  const std::size_t grid = m.config.grid_size();

  auto items = map_inputs<ItemResult>(m.inputs, f.threads, [&](const std::string& path) {
    try {
      const Image img = load_image(path, m.config);
      std::optional<EntropyScores> scores;
      std::vector<std::size_t> ids;
      pruned_forward(img, model, m.schedule, [&](std::size_t b, const TokenMatrix& x, const AttentionTensor& a) {
        if (b != block) return;
        scores = head_averaged_scores(a, map_criterion, b, m.schedule.scoring);
        ids = x.patch_ids;
      });

      const auto [lo, hi] = std::minmax_element(scores->values.begin(), scores->values.end());
      std::vector<std::uint8_t> pixels(grid * grid, 255);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const double t = *hi > *lo ? (scores->values[i] - *lo) / (*hi - *lo) : 0.0;
        pixels[ids[i]] = static_cast<std::uint8_t>(std::lround(255.0 * t));
      }
      const std::string stem = fs::path(path).stem().string() + ".block" + std::to_string(block);
      const fs::path pgm = fs::path(m.out_dir) / (stem + ".pgm");
      const fs::path sidecar = fs::path(m.out_dir) / (stem + ".json");
      write_pgm(pgm, grid, grid, pixels);

      json side = criterion_json(map_criterion);
      side["path"] = path;
      side["block"] = block;
      side["grid"] = {grid, grid};
      side["patch_ids"] = ids;
      side["scores"] = scores->values;
      side["min"] = *lo;
      side["max"] = *hi;
      std::ofstream(sidecar) << side.dump() << '\n';
      return ItemResult{json{{"path", path}, {"heatmap", pgm.string()}, {"scores", sidecar.string()}}, true};
    } catch (const std::exception& e) {
      return error_record(path, e);
    }
  });
  for (const auto& item : items) out << item.record.dump() << '\n';
  return item_exit_code(items);
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  Criterion criterion;
  double keep_rate = 1.0;
  std::uint64_t flops = 0;
  double reduction = 0.0;
  double agreement = 0.0;
  double overlap = 0.0;
};

double kept_overlap(const PruneTrace& a, const PruneTrace& b) {
  const std::size_t events = std::min(a.events.size(), b.events.size());
  if (events == 0) return 1.0;
  double total = 0.0;
  for (std::size_t e = 0; e < events; ++e) {
    const auto& ka = a.events[e].kept_ids;
    const auto& kb = b.events[e].kept_ids;
    std::vector<std::size_t> common;
    std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(common));
    total += ka.empty() ? 1.0 : static_cast<double>(common.size()) / static_cast<double>(ka.size());
  }
  return total / static_cast<double>(events);
}

int cmd_sweep(const ManifestFlags& f, const std::string& rates_text, const std::string& criteria_text,
              bool as_json, std::ostream& out) {
  const RunManifest m = make_manifest(f);
  const std::vector<double> rates = parse_rates(rates_text);
  std::vector<Criterion> criteria;
  for (const auto& c : split_list(criteria_text)) criteria.push_back(parse_criterion(c, f.alpha, f.seed));
  if (criteria.empty()) throw ConfigError("empty criteria list");
  if (m.inputs.empty()) throw ConfigError("sweep needs at least one input image");

  const VitModel model = load_model(m);
  std::vector<Image> images;
  for (const auto& p : m.inputs) images.push_back(load_image(p, m.config));

  std::vector<std::size_t> dense_argmax;
  for (const auto& img : images) dense_argmax.push_back(argmax(dense_forward(img, model)));

  std::vector<SweepRow> rows;
  for (double r : rates) {
    std::vector<std::vector<PruneTrace>> traces(criteria.size());
    for (std::size_t c = 0; c < criteria.size(); ++c) {
      PruneSchedule s = m.schedule;
      s.keep_rate = r;
      s.criterion = criteria[c];
      const FlopsReport flops = model_flops(m.config, s);
      std::size_t agree = 0;
      for (std::size_t i = 0; i < images.size(); ++i) {
        PrunedResult res = pruned_forward(images[i], model, s);
        agree += argmax(res.probabilities) == dense_argmax[i];
        traces[c].push_back(std::move(res.trace));
      }
      double overlap = 0.0;
      for (std::size_t i = 0; i < images.size(); ++i) overlap += kept_overlap(traces[0][i], traces[c][i]);
      rows.push_back({criteria[c], r, flops.total, flops.reduction,
                      static_cast<double>(agree) / static_cast<double>(images.size()),
                      overlap / static_cast<double>(images.size())});
    }
  }

  json doc = {{"reference_criterion", criteria.front().label()}, {"images", images.size()}, {"rows", json::array()}};
  for (const auto& row : rows) {
    json j = criterion_json(row.criterion);
    j["label"] = row.criterion.label();
    j["keep_rate"] = row.keep_rate;
    j["flops"] = row.flops;
    j["reduction"] = row.reduction;
    j["agreement"] = row.agreement;
    j["overlap"] = row.overlap;
    doc["rows"].push_back(std::move(j));
  }

  std::string table;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %9s %16s %10s %10s %10s\n", "criterion", "keep_rate", "flops",
                "reduction", "agreement", "overlap");
  table += line;
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%-16s %9.2f %16llu %10.4f %10.4f %10.4f\n", row.criterion.label().c_str(),
                  row.keep_rate, static_cast<unsigned long long>(row.flops), row.reduction, row.agreement,
                  row.overlap);
    table += line;
  }

  if (!m.out_dir.empty()) {
    std::ofstream(fs::path(m.out_dir) / "sweep.json") << doc.dump(2) << '\n';
    std::ofstream(fs::path(m.out_dir) / "sweep.txt") << table;
  }
  if (as_json) {
    out << doc.dump() << '\n';
  } else {
    out << table;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// flops / bench

int cmd_flops(const ManifestFlags& f, bool as_json, std::ostream& out) {
  const RunManifest m = make_manifest(f);
  const FlopsReport rep = model_flops(m.config, m.schedule);
  if (as_json) {
    out << to_json(rep).dump() << '\n';
  } else {
    out << format_table(rep);
  }
  return kExitOk;
}

int cmd_bench(const ManifestFlags& f, const std::string& rates_text, std::size_t n_images, std::size_t warmup,
              std::size_t batches, bool as_json, std::ostream& out) {
  const RunManifest m = make_manifest(f);
  const std::vector<double> rates = parse_rates(rates_text);
  const VitModel model = m.archive.empty() ? VitModel::load(random_weights(m.config, m.seed).build(), m.config)
                                           : load_model(m);
  std::vector<Image> images;
  for (const auto& p : m.inputs) images.push_back(load_image(p, m.config));
  for (std::size_t i = images.size(); i < std::max<std::size_t>(n_images, 1); ++i) {
    Image img = random_image(m.config, m.seed + 1 + i);
    normalize(img, m.config.mean, m.config.std);
    images.push_back(std::move(img));
  }
  const ThroughputReport rep = benchmark(model, m.schedule, rates, images, warmup, batches, f.threads);
  if (as_json) {
    out << to_json(rep).dump() << '\n';
  } else {
    out << format_table(rep);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze: per-block entropy statistics and attention distance

json histogram(const std::vector<double>& values, double upper, std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    const double t = upper > 0.0 ? v / upper : 0.0;
    counts[std::min<std::size_t>(bins - 1, static_cast<std::size_t>(std::max(0.0, t) * static_cast<double>(bins)))]++;
  }
  return {{"upper", upper}, {"counts", counts}};
}

int cmd_analyze(const ManifestFlags& f, const std::string& alphas_text, std::size_t bins, std::ostream& out) {
  const RunManifest m = make_manifest(f);
  std::vector<double> alphas;
  for (const auto& a : split_list(alphas_text)) alphas.push_back(std::stod(a));
  if (alphas.empty()) throw ConfigError("empty alpha list");
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError("alpha must be positive");
  }
  bins = std::max<std::size_t>(bins, 1);
  const VitModel model = load_model(m);

  auto items = map_inputs<std::vector<ItemResult>>(m.inputs, f.threads, [&](const std::string& path) {
    std::vector<ItemResult> lines;
    try {
      const Image img = load_image(path, m.config);
      pruned_forward(img, model, m.schedule, [&](std::size_t b, const TokenMatrix& x, const AttentionTensor& a) {
        std::vector<double> head_entropy;
        for (std::size_t h = 0; h < a.num_heads(); ++h) {
          AttentionTensor single{{a.heads[h]}};
          const auto s = head_averaged_scores(single, Criterion::shannon(), b, m.schedule.scoring);
          double mean = 0.0;
          for (double v : s.values) mean += v;
          head_entropy.push_back(mean / static_cast<double>(s.values.size()));
        }
        json hists = json::object();
        const double upper = std::log(static_cast<double>(x.patch_count()));
        for (double alpha : alphas) {
          const Criterion c = alpha == 1.0 ? Criterion::shannon() : Criterion::renyi(alpha);
          std::ostringstream key;
          key << alpha;
          hists[key.str()] = histogram(head_averaged_scores(a, c, b, m.schedule.scoring).values, upper, bins);
        }
        lines.push_back({json{{"path", path},
                              {"block", b},
                              {"tokens", x.count()},
                              {"head_entropy", head_entropy},
                              {"attention_distance",
                               attention_distance(a, x.patch_ids, m.config.grid_size(), m.config.patch_size)},
                              {"histograms", hists}},
                         true});
      });
    } catch (const std::exception& e) {
      lines.assign(1, error_record(path, e));
    }
    return lines;
  });

  std::vector<ItemResult> flat;
  for (auto& v : items) flat.insert(flat.end(), v.begin(), v.end());
  emit_lines(m, "analyze.jsonl", flat, out);
  return item_exit_code(flat);
}

// ---------------------------------------------------------------------------
// make-toy

int cmd_make_toy(const std::string& config_path, std::uint64_t seed, const std::string& output, std::ostream& out) {
  const ModelConfig config = config_path.empty() ? ModelConfig::deit_small() : load_config(config_path);
  const WeightArchive archive = random_weights(config, seed).build();
  store_archive(archive, output);
  out << json{{"archive", output}, {"tensors", archive.entries().size()}, {"config", config}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vision Transformer inference with attention-entropy patch pruning"};
  app.name("entroprune");
  app.require_subcommand(1);

  ManifestFlags classify_flags, map_flags, sweep_flags, flops_flags, bench_flags, analyze_flags;

  auto* classify = app.add_subcommand("classify", "Classify images; one JSON record per image");
  add_model_flags(classify, classify_flags, true, true);
  std::size_t k = 5;
  bool with_trace = false;
  classify->add_option("--top-k", k, "Number of top classes to report")->capture_default_str();
  classify->add_flag("--trace", with_trace, "Include the full pruning trace in each record");

  auto* emap = app.add_subcommand("entropy-map", "Write per-patch entropy heatmaps (PGM + JSON sidecar)");
  add_model_flags(emap, map_flags, true, true);
  std::size_t map_block = 1;
  std::optional<double> map_alpha;
  emap->add_option("--block", map_block, "1-based block whose attention is mapped")->required();
  emap->remove_option(emap->get_option("--alpha"));
  emap->add_option("--alpha", map_alpha, "Renyi order for the map (default: Shannon)");

  auto* sweep = app.add_subcommand("sweep", "Compare criteria across keep rates");
  add_model_flags(sweep, sweep_flags, true, true);
  std::string sweep_rates = "0.9,0.8,0.7,0.6,0.5,0.4,0.3";
  std::string sweep_criteria = "shannon,renyi:2,renyi:5,renyi:10,evit";
  bool sweep_json = false;
  sweep->add_option("--keep-rates", sweep_rates, "Comma-separated keep rates")->capture_default_str();
  sweep->add_option("--criteria", sweep_criteria, "Comma-separated criteria; the first is the overlap reference")
      ->capture_default_str();
  sweep->add_flag("--json", sweep_json, "Print JSON instead of the text table");

  auto* flops = app.add_subcommand("flops", "Analytic FLOPs for a config and schedule");
  add_model_flags(flops, flops_flags, false, false);
  bool flops_json = false;
  flops->add_flag("--json", flops_json, "Print JSON instead of the text table");

  auto* bench = app.add_subcommand("bench", "Measure dense vs pruned throughput");
  add_model_flags(bench, bench_flags, false, true);
  std::string bench_rates = "0.9,0.7,0.5,0.3";
  std::size_t bench_images = 4, bench_warmup = 1, bench_batches = 5;
  bool bench_json = false;
  bench->add_option("--keep-rates", bench_rates, "Comma-separated keep rates")->capture_default_str();
  bench->add_option("--images", bench_images, "Synthetic images when no inputs are given")->capture_default_str();
  bench->add_option("--warmup", bench_warmup, "Untimed passes")->capture_default_str();
  bench->add_option("--batches", bench_batches, "Timed rounds; the median is reported")->capture_default_str();
  bench->add_flag("--json", bench_json, "Print JSON instead of the text table");

  auto* analyze = app.add_subcommand("analyze", "Per-block entropy histograms and attention distance");
  add_model_flags(analyze, analyze_flags, true, true);
  std::string analyze_alphas = "1,2,5,10";
  std::size_t analyze_bins = 20;
  analyze->add_option("--alphas", analyze_alphas, "Orders for the histograms (1 = Shannon)")->capture_default_str();
  analyze->add_option("--bins", analyze_bins, "Histogram bins over [0, log m]")->capture_default_str();

  auto* toy = app.add_subcommand("make-toy", "Write a seeded random-weight archive for a config");
  std::string toy_config, toy_output;
  std::uint64_t toy_seed = 0;
  toy->add_option("--config", toy_config, "JSON model config (defaults to DeiT-S/16, 224px)");
  toy->add_option("--seed", toy_seed, "Weight seed")->capture_default_str();
  toy->add_option("--output", toy_output, "Archive path")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*classify) return cmd_classify(classify_flags, k, with_trace, out);
    if (*emap) return cmd_entropy_map(map_flags, map_block, map_alpha, out);
    if (*sweep) return cmd_sweep(sweep_flags, sweep_rates, sweep_criteria, sweep_json, out);
    if (*flops) return cmd_flops(flops_flags, flops_json, out);
    if (*bench) return cmd_bench(bench_flags, bench_rates, bench_images, bench_warmup, bench_batches, bench_json, out);
    if (*analyze) return cmd_analyze(analyze_flags, analyze_alphas, analyze_bins, out);
    if (*toy) return cmd_make_toy(toy_config, toy_seed, toy_output, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace entroprune::cli
