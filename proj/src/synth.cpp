#include "svmf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "svmf/io.hpp"
#include "svmf/errors.hpp"
#include "svmf/graph.hpp"
#include "svmf/rng.hpp"

namespace svmf {

using nlohmann::json;

void PerturbationParams::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(drop_prob) || !in_unit(substitute_prob)) {
    throw ValidationError("perturbation probabilities must be in [0, 1]");
  }
  if (!(jitter_frac >= 0.0) || !std::isfinite(jitter_frac)) {
    throw ValidationError("jitter_frac must be finite and nonnegative");
  }
}

std::vector<PerturbationParams> reference_perturbation_levels() {
  return {
      {0.02, 0.02, 0.05, 0},
      {0.05, 0.05, 0.10, 0},
      {0.10, 0.10, 0.20, 0},
  };
}

namespace {

// Widest box the size draw below can produce.
constexpr double kBoxSizeSpread = 1.4;

}  // namespace

void SynthSpec::validate() const {
  if (instance_count_min < 1 || instance_count_max < instance_count_min) {
    throw GenerationError("instance count range must satisfy 1 <= min <= max");
  }
  if (class_pool.empty()) {
    throw GenerationError("class pool is empty");
  }
  if (!(canvas_width > 0.0) || !(canvas_height > 0.0)) {
    throw GenerationError("canvas must be positive");
  }
  if (!(mean_box_size > 0.0)) {
    throw GenerationError("mean box size must be positive");
  }
  if (mean_box_size * kBoxSizeSpread > canvas_width ||
      mean_box_size * kBoxSizeSpread > canvas_height) {
    throw GenerationError("boxes cannot fit the canvas: mean box size " +
                          std::to_string(mean_box_size) + " too large for " +
                          std::to_string(canvas_width) + "x" +
                          std::to_string(canvas_height));
  }
  if (!(overlap_density >= 0.0 && overlap_density <= 1.0)) {
    throw GenerationError("overlap density must be in [0, 1]");
  }
}

DetectionSet generate_base(const SynthSpec& spec, std::uint64_t seed,
                           const std::string& image_key) {
  spec.validate();
  SeededRng rng(seed);
  DetectionSet set;
  set.image_key = image_key.empty() ? "synth-" + std::to_string(seed) : image_key;

  const auto span = static_cast<std::uint64_t>(spec.instance_count_max -
                                               spec.instance_count_min + 1);
  const auto count = spec.instance_count_min +
                     static_cast<int>(rng.uniform_index(span));

  auto clamp = [](double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
  };

  for (int idx = 0; idx < count; ++idx) {
    DetectionInstance inst;
    inst.instance_id = idx;
    inst.class_id = spec.class_pool[rng.uniform_index(spec.class_pool.size())];
    const double w = spec.mean_box_size * rng.uniform(0.6, kBoxSizeSpread);
    const double h = spec.mean_box_size * rng.uniform(0.6, kBoxSizeSpread);

    double x0 = 0.0;
    double y0 = 0.0;
    const bool overlap_previous =
        idx > 0 && rng.uniform01() < spec.overlap_density;
    if (overlap_previous) {
      // Center the new box somewhere over the anchor's extent; clamping to
      // the canvas cannot break the overlap because the anchor itself is
      // inside the canvas.
      const auto& anchor =
          set.instances[rng.uniform_index(static_cast<std::uint64_t>(idx))].box;
      x0 = rng.uniform(anchor.x_min - 0.5 * w, anchor.x_max - 0.5 * w);
      y0 = rng.uniform(anchor.y_min - 0.5 * h, anchor.y_max - 0.5 * h);
    } else {
      x0 = rng.uniform(0.0, spec.canvas_width - w);
      y0 = rng.uniform(0.0, spec.canvas_height - h);
    }
    x0 = clamp(x0, 0.0, spec.canvas_width - w);
    y0 = clamp(y0, 0.0, spec.canvas_height - h);
    inst.box = {x0, y0, x0 + w, y0 + h};
    inst.score = rng.uniform(0.5, 1.0);
    set.instances.push_back(inst);
  }
  return set;
}

DetectionSet perturb(const DetectionSet& set, const PerturbationParams& params,
                     const std::vector<std::int32_t>& class_pool) {
  params.validate();
  SeededRng rng(params.seed);

  struct Draw {
    bool drop;
    bool substitute;
    double pick;
    double jitter[4];
  };
  // Every instance consumes the same number of draws, so the resurrection
  // of the last instance below cannot shift the stream.
  std::vector<Draw> draws;
  draws.reserve(set.instances.size());
  bool all_dropped = true;
  for (std::size_t i = 0; i < set.instances.size(); ++i) {
    Draw draw;
    draw.drop = rng.uniform01() < params.drop_prob;
    draw.substitute = rng.uniform01() < params.substitute_prob;
    draw.pick = rng.uniform01();
    for (double& j : draw.jitter) {
      j = rng.uniform(-1.0, 1.0);
    }
    all_dropped = all_dropped && draw.drop;
    draws.push_back(draw);
  }
  if (all_dropped && !draws.empty()) {
    draws.back().drop = false;
  }

  DetectionSet out;
  out.image_key = set.image_key;
  for (std::size_t i = 0; i < set.instances.size(); ++i) {
    if (draws[i].drop) {
      continue;
    }
    DetectionInstance inst = set.instances[i];
    if (draws[i].substitute) {
      std::vector<std::int32_t> candidates;
      candidates.reserve(class_pool.size());
      for (std::int32_t cls : class_pool) {
        if (cls != inst.class_id) {
          candidates.push_back(cls);
        }
      }
      if (!candidates.empty()) {
        inst.class_id = candidates[rng.uniform_index(candidates.size())];
      }
    }
    if (params.jitter_frac > 0.0) {
      const double scale = params.jitter_frac * inst.box.diagonal();
      inst.box.x_min += draws[i].jitter[0] * scale;
      inst.box.y_min += draws[i].jitter[1] * scale;
      inst.box.x_max += draws[i].jitter[2] * scale;
      inst.box.y_max += draws[i].jitter[3] * scale;
      if (inst.box.x_min > inst.box.x_max) {
        std::swap(inst.box.x_min, inst.box.x_max);
      }
      if (inst.box.y_min > inst.box.y_max) {
        std::swap(inst.box.y_min, inst.box.y_max);
      }
    }
    out.instances.push_back(inst);
  }
  return out;
}

namespace {

// Stream labels for derived seeds; recorded here so the manifest's
// seed_mixing id stays meaningful.
constexpr std::uint64_t kBaseStream = 1;
constexpr std::uint64_t kVariantStream = 2;

}  // namespace

Benchmark build_benchmark(const SynthSpec& spec, int base_count,
                          int variants_per_base,
                          const std::vector<PerturbationParams>& levels,
                          std::uint64_t seed, const Catalog& catalog,
                          const Hyperparams& hp) {
  spec.validate();
  hp.validate();
  if (base_count < 1 || variants_per_base < 1) {
    throw GenerationError("base and variant counts must be at least 1");
  }
  if (levels.empty()) {
    throw GenerationError("at least one perturbation level is required");
  }
  for (const auto& level : levels) {
    level.validate();
  }
  for (std::int32_t cls : spec.class_pool) {
    catalog.at(cls);
  }

  Benchmark bench;
  bench.seed = seed;
  bench.spec = spec;
  bench.hyperparams = hp;
  bench.n = static_cast<std::uint32_t>(catalog.size());
  bench.variants_per_base = variants_per_base;
  bench.levels.resize(levels.size());
  for (std::size_t level_idx = 0; level_idx < levels.size(); ++level_idx) {
    bench.levels[level_idx].name = "level_" + std::to_string(level_idx);
    bench.levels[level_idx].params = levels[level_idx];
  }

  for (int b = 0; b < base_count; ++b) {
    const std::string base_key = "base_" + std::to_string(b);
    const auto base_seed =
        derive_seed(seed, {kBaseStream, static_cast<std::uint64_t>(b)});
    const DetectionSet base = generate_base(spec, base_seed, base_key);

    BenchmarkQuery query;
    query.key = base_key;
    query.target_key = base_key + "_v0";
    query.fingerprint =
        compute_svmf(build_graph(base, hp.expansion_factor), catalog, hp);
    bench.queries.push_back(std::move(query));

    for (std::size_t level_idx = 0; level_idx < levels.size(); ++level_idx) {
      for (int v = 0; v < variants_per_base; ++v) {
        PerturbationParams params = levels[level_idx];
        // Deliberately level-independent: variant v of base b reuses the
        // same draw stream at every level, so stronger levels perturb the
        // same instances harder instead of resampling them.
        params.seed = derive_seed(
            seed, {kVariantStream, static_cast<std::uint64_t>(b),
                   static_cast<std::uint64_t>(v)});
        DetectionSet variant = perturb(base, params, spec.class_pool);
        variant.image_key = base_key + "_v" + std::to_string(v);
        bench.levels[level_idx].variants.push_back(std::move(variant));
      }
    }
  }
  return bench;
}

void write_benchmark(const Benchmark& bench, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "queries");
  fs::create_directories(fs::path(dir) / "index");

  json level_list = json::array();
  for (const auto& level : bench.levels) {
    level_list.push_back({{"name", level.name},
                          {"drop_prob", level.params.drop_prob},
                          {"substitute_prob", level.params.substitute_prob},
                          {"jitter_frac", level.params.jitter_frac},
                          {"index_file", "index/" + level.name + ".jsonl"}});
  }
  json query_list = json::array();
  for (const auto& query : bench.queries) {
    query_list.push_back({{"key", query.key},
                          {"target_key", query.target_key},
                          {"file", "queries/" + query.key + ".svmf.json"}});
  }
  const json manifest = {
      {"generator", kGeneratorId},
      {"seed_mixing", kSeedMixingId},
      {"seed", bench.seed},
      {"n", bench.n},
      {"base_count", bench.queries.size()},
      {"variants_per_base", bench.variants_per_base},
      {"hyperparams",
       {{"h1", bench.hyperparams.h1},
        {"h2_table", bench.hyperparams.h2_table},
        {"distance_cap", bench.hyperparams.distance_cap},
        {"carbon_divisor", bench.hyperparams.carbon_divisor},
        {"expansion_factor", bench.hyperparams.expansion_factor}}},
      {"spec",
       {{"instance_count_min", bench.spec.instance_count_min},
        {"instance_count_max", bench.spec.instance_count_max},
        {"class_pool", bench.spec.class_pool},
        {"canvas_width", bench.spec.canvas_width},
        {"canvas_height", bench.spec.canvas_height},
        {"mean_box_size", bench.spec.mean_box_size},
        {"overlap_density", bench.spec.overlap_density}}},
      {"levels", level_list},
      {"queries", query_list},
  };
  write_file_atomic((fs::path(dir) / "manifest.json").string(),
                            manifest.dump(2) + "\n");

  for (const auto& query : bench.queries) {
    write_file_atomic(
        (fs::path(dir) / "queries" / (query.key + ".svmf.json")).string(),
        query.fingerprint.to_json() + "\n");
  }
  for (const auto& level : bench.levels) {
    std::ostringstream lines;
    for (const auto& variant : level.variants) {
      lines << detection_set_to_json_line(variant) << '\n';
    }
    write_file_atomic(
        (fs::path(dir) / "index" / (level.name + ".jsonl")).string(),
        lines.str());
  }
}

}  // namespace svmf
