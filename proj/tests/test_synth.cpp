#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "svmf/errors.hpp"
#include "svmf/graph.hpp"
#include "svmf/retrieval.hpp"
#include "svmf/synth.hpp"

#include "oracle.hpp"

using namespace svmf;

namespace {

SynthSpec small_spec() {
  SynthSpec spec;
  spec.instance_count_min = 5;
  spec.instance_count_max = 5;
  spec.class_pool = {0, 1, 2, 3, 9, 10};
  spec.canvas_width = 300.0;
  spec.canvas_height = 300.0;
  spec.mean_box_size = 80.0;
  spec.overlap_density = 1.0;
  return spec;
}

std::string jsonl_of(const DetectionSet& set) {
  return detection_set_to_json_line(set);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("generation is deterministic in (spec, seed)") {
  const auto spec = small_spec();
  const auto a = generate_base(spec, 42);
  const auto b = generate_base(spec, 42);
  CHECK(jsonl_of(a) == jsonl_of(b));
  const auto c = generate_base(spec, 43);
  CHECK(jsonl_of(a) != jsonl_of(c));
}

TEST_CASE("count-one spec yields a single instance") {
  auto spec = small_spec();
  spec.instance_count_min = 1;
  spec.instance_count_max = 1;
  const auto set = generate_base(spec, 7);
  CHECK(set.instances.size() == 1);
  CHECK(set.instances[0].instance_id == 0);
}

TEST_CASE("dense placement yields a connected graph") {
  const auto spec = small_spec();
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 11ULL, 99ULL}) {
    const auto set = generate_base(spec, seed);
    REQUIRE(set.instances.size() == 5);
    const auto g = build_graph(set, 0.1);
    for (std::int64_t node = 1; node < 5; ++node) {
      CHECK(instance_distance(g, 0, node).has_value());
    }
  }
}

TEST_CASE("instances stay inside the canvas") {
  auto spec = small_spec();
  spec.instance_count_min = 10;
  spec.instance_count_max = 20;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto set = generate_base(spec, seed);
    for (const auto& inst : set.instances) {
      CHECK(inst.box.x_min >= 0.0);
      CHECK(inst.box.y_min >= 0.0);
      CHECK(inst.box.x_max <= spec.canvas_width);
      CHECK(inst.box.y_max <= spec.canvas_height);
      CHECK(inst.score >= 0.5);
      CHECK(inst.score <= 1.0);
    }
  }
}

TEST_CASE("infeasible specs are generation errors") {
  auto spec = small_spec();
  spec.mean_box_size = 400.0;  // cannot fit 300x300
  CHECK_THROWS_AS(generate_base(spec, 1), GenerationError);
  spec = small_spec();
  spec.class_pool.clear();
  CHECK_THROWS_AS(generate_base(spec, 1), GenerationError);
  spec = small_spec();
  spec.instance_count_min = 0;
  CHECK_THROWS_AS(generate_base(spec, 1), GenerationError);
}

TEST_CASE("identity perturbation returns the same instances") {
  const auto set = generate_base(small_spec(), 5);
  PerturbationParams identity;
  identity.seed = 17;
  const auto out = perturb(set, identity, small_spec().class_pool);
  REQUIRE(out.instances.size() == set.instances.size());
  for (std::size_t i = 0; i < set.instances.size(); ++i) {
    CHECK(out.instances[i].instance_id == set.instances[i].instance_id);
    CHECK(out.instances[i].class_id == set.instances[i].class_id);
    CHECK(out.instances[i].box.x_min == set.instances[i].box.x_min);
    CHECK(out.instances[i].box.y_max == set.instances[i].box.y_max);
    CHECK(out.instances[i].score == set.instances[i].score);
  }
}

TEST_CASE("full drop keeps the last instance") {
  const auto set = generate_base(small_spec(), 5);
  PerturbationParams drop_all;
  drop_all.drop_prob = 1.0;
  drop_all.seed = 3;
  const auto out = perturb(set, drop_all, small_spec().class_pool);
  REQUIRE(out.instances.size() == 1);
  CHECK(out.instances[0].instance_id == set.instances.back().instance_id);
}

TEST_CASE("perturbation is deterministic in its seed") {
  const auto set = generate_base(small_spec(), 5);
  PerturbationParams params{0.3, 0.3, 0.2, 123};
  const auto a = perturb(set, params, small_spec().class_pool);
  const auto b = perturb(set, params, small_spec().class_pool);
  CHECK(jsonl_of(a) == jsonl_of(b));
  params.seed = 124;
  const auto c = perturb(set, params, small_spec().class_pool);
  CHECK(jsonl_of(a) != jsonl_of(c));
}

TEST_CASE("substituted labels come from the pool") {
  const auto set = generate_base(small_spec(), 8);
  PerturbationParams params{0.0, 1.0, 0.0, 55};
  const auto out = perturb(set, params, small_spec().class_pool);
  REQUIRE(out.instances.size() == set.instances.size());
  const auto& pool = small_spec().class_pool;
  for (std::size_t i = 0; i < out.instances.size(); ++i) {
    CHECK(out.instances[i].class_id != set.instances[i].class_id);
    CHECK(std::find(pool.begin(), pool.end(), out.instances[i].class_id) !=
          pool.end());
  }
}

TEST_CASE("perturbation parameters are validated") {
  const auto set = generate_base(small_spec(), 5);
  PerturbationParams bad{1.5, 0.0, 0.0, 0};
  CHECK_THROWS_AS(perturb(set, bad, small_spec().class_pool), ValidationError);
  PerturbationParams bad_jitter{0.0, 0.0, -1.0, 0};
  CHECK_THROWS_AS(perturb(set, bad_jitter, small_spec().class_pool),
                  ValidationError);
}

TEST_CASE("benchmark bookkeeping and identity retrieval") {
  const auto catalog = testing::toy_catalog();
  const Hyperparams hp;
  PerturbationParams identity;

  auto bench = build_benchmark(small_spec(), 1, 1, {identity}, 9, catalog, hp);
  REQUIRE(bench.queries.size() == 1);
  REQUIRE(bench.levels.size() == 1);
  REQUIRE(bench.levels[0].variants.size() == 1);
  CHECK(bench.queries[0].target_key == "base_0_v0");

  FingerprintIndex idx;
  for (const auto& variant : bench.levels[0].variants) {
    idx.add(variant.image_key,
            compute_svmf(build_graph(variant, hp.expansion_factor), catalog, hp));
  }
  CHECK(idx.rank_of(bench.queries[0].fingerprint, "base_0_v0") == 1);

  auto bench2 = build_benchmark(small_spec(), 3, 2,
                                reference_perturbation_levels(), 9, catalog, hp);
  CHECK(bench2.queries.size() == 3);
  CHECK(bench2.levels.size() == 3);
  CHECK(bench2.levels[0].variants.size() == 6);
  CHECK(bench2.levels[2].variants[5].image_key == "base_2_v1");
}

TEST_CASE("benchmark writes a reproducible bundle") {
  namespace fs = std::filesystem;
  const auto catalog = testing::toy_catalog();
  const Hyperparams hp;
  const auto bench = build_benchmark(small_spec(), 2, 2,
                                     reference_perturbation_levels(), 31,
                                     catalog, hp);
  const auto dir_a = fs::temp_directory_path() / "svmf_bundle_a";
  const auto dir_b = fs::temp_directory_path() / "svmf_bundle_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  write_benchmark(bench, dir_a.string());
  write_benchmark(bench, dir_b.string());

  CHECK(fs::exists(dir_a / "manifest.json"));
  CHECK(fs::exists(dir_a / "queries" / "base_0.svmf.json"));
  CHECK(fs::exists(dir_a / "index" / "level_2.jsonl"));
  CHECK(read_file(dir_a / "manifest.json") == read_file(dir_b / "manifest.json"));
  CHECK(read_file(dir_a / "index" / "level_1.jsonl") ==
        read_file(dir_b / "index" / "level_1.jsonl"));
  CHECK(read_file(dir_a / "queries" / "base_1.svmf.json") ==
        read_file(dir_b / "queries" / "base_1.svmf.json"));

  // Rebuilding from the same master seed reproduces the bundle bytes.
  const auto again = build_benchmark(small_spec(), 2, 2,
                                     reference_perturbation_levels(), 31,
                                     catalog, hp);
  fs::remove_all(dir_b);
  write_benchmark(again, dir_b.string());
  CHECK(read_file(dir_a / "index" / "level_0.jsonl") ==
        read_file(dir_b / "index" / "level_0.jsonl"));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}
