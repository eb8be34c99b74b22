#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svmf/catalog.hpp"
#include "svmf/detection.hpp"
#include "svmf/fingerprint.hpp"

namespace svmf {

// Detection-space perturbation standing in for image-level augmentation:
// instance drops, class-label swaps, and box jitter degrade a clean
// detection set the way augmented renderings degrade detector output.
struct PerturbationParams {
  double drop_prob = 0.0;
  double substitute_prob = 0.0;
  // Per-coordinate uniform displacement, as a fraction of the box diagonal.
  double jitter_frac = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// The three reference perturbation levels, ordered weakest to strongest.
std::vector<PerturbationParams> reference_perturbation_levels();

struct SynthSpec {
  int instance_count_min = 5;
  int instance_count_max = 12;
  std::vector<std::int32_t> class_pool;
  double canvas_width = 1024.0;
  double canvas_height = 1024.0;
  double mean_box_size = 120.0;
  // Probability that a new instance is placed overlapping an earlier one;
  // 1.0 forces a connected substructure-graph.
  double overlap_density = 0.9;

  void validate() const;
};

// Deterministic for fixed (spec, seed). image_key defaults to
// "synth-<seed>" when not supplied.
DetectionSet generate_base(const SynthSpec& spec, std::uint64_t seed,
                           const std::string& image_key = "");

// Applies drop, substitute, and jitter independently per instance,
// deterministically in params.seed. Never returns an empty set: when every
// instance would drop, the last one is kept. Substitutions draw uniformly
// from class_pool minus the current class.
DetectionSet perturb(const DetectionSet& set, const PerturbationParams& params,
                     const std::vector<std::int32_t>& class_pool);

struct BenchmarkLevel {
  std::string name;
  PerturbationParams params;
  // Variant detection sets, base-major then variant order.
  std::vector<DetectionSet> variants;
};

struct BenchmarkQuery {
  std::string key;
  std::string target_key;
  SVMF fingerprint;
};

struct Benchmark {
  std::uint64_t seed = 0;
  SynthSpec spec;
  Hyperparams hyperparams;
  std::uint32_t n = 0;
  int variants_per_base = 0;
  std::vector<BenchmarkQuery> queries;  // one per base
  std::vector<BenchmarkLevel> levels;
};

// For each base, emits the unperturbed ground-truth fingerprint (query
// side) and variants_per_base perturbed detection sets per level (index
// side). The query's target is its first variant. All seeding is derived
// from the master seed.
Benchmark build_benchmark(const SynthSpec& spec, int base_count,
                          int variants_per_base,
                          const std::vector<PerturbationParams>& levels,
                          std::uint64_t seed, const Catalog& catalog,
                          const Hyperparams& hp);

// Bundle layout under dir:
//   manifest.json             seeds, params, generator id, query targets
//   queries/<key>.svmf.json   ground-truth fingerprints
//   index/<level>.jsonl       variant detection sets
void write_benchmark(const Benchmark& bench, const std::string& dir);

}  // namespace svmf
