// svmf command-line tool: fingerprinting, indexing, search, ranking,
// metric evaluation, and synthetic benchmark generation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svmf/catalog.hpp"
#include "svmf/detection.hpp"
#include "svmf/io.hpp"
#include "svmf/errors.hpp"
#include "svmf/evaluation.hpp"
#include "svmf/fingerprint.hpp"
#include "svmf/graph.hpp"
#include "svmf/retrieval.hpp"
#include "svmf/rng.hpp"
#include "svmf/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct HyperFlags {
  svmf::Hyperparams hp;
  double score_threshold = 0.0;
  std::vector<double> h2_override;

  void attach(CLI::App* cmd) {
    cmd->add_option("--h1", hp.h1, "Diagonal count weight")
        ->capture_default_str();
    cmd->add_option("--h2", h2_override,
                    "Distance weight table, cap+1 comma-separated values")
        ->delimiter(',');
    cmd->add_option("--cap", hp.distance_cap, "Maximum pair distance")
        ->capture_default_str();
    cmd->add_option("--carbon-divisor", hp.carbon_divisor,
                    "Per carbon-backbone endpoint divisor")
        ->capture_default_str();
    cmd->add_option("--expansion", hp.expansion_factor,
                    "Box expansion as a fraction of the smallest diagonal")
        ->capture_default_str();
    cmd->add_option("--score-threshold", score_threshold,
                    "Drop instances scoring below this value")
        ->capture_default_str();
  }

  svmf::Hyperparams resolve() const {
    svmf::Hyperparams out = hp;
    if (!h2_override.empty()) {
      out.h2_table = h2_override;
    } else if (out.distance_cap != 4) {
      throw svmf::ValidationError(
          "--cap without --h2: the weight table must list cap + 1 values");
    }
    out.validate();
    return out;
  }
};

std::string format_score(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  svmf::write_file_atomic(path, text);
}

svmf::SVMF fingerprint_set(const svmf::DetectionSet& set,
                           const svmf::Catalog& catalog,
                           const svmf::Hyperparams& hp,
                           double score_threshold) {
  const auto filtered = score_threshold > 0.0
                            ? svmf::apply_score_threshold(set, score_threshold)
                            : set;
  return svmf::compute_svmf(svmf::build_graph(filtered, hp.expansion_factor),
                            catalog, hp);
}

// --- fingerprint -------------------------------------------------------------

int cmd_fingerprint(const std::string& catalog_path,
                    const std::string& detections_path,
                    const std::string& out_dir, const std::string& format,
                    const HyperFlags& flags) {
  const auto hp = flags.resolve();
  const auto catalog = svmf::load_catalog(catalog_path);
  const auto sets = svmf::parse_detections_file(detections_path);
  fs::create_directories(out_dir);
  for (const auto& set : sets) {
    const auto fp = fingerprint_set(set, catalog, hp, flags.score_threshold);
    if (format == "json") {
      write_text_atomic((fs::path(out_dir) / (set.image_key + ".svmf.json")).string(),
                        fp.to_json() + "\n");
    } else {
      svmf::save_svmf(fp, (fs::path(out_dir) / (set.image_key + ".svmf")).string());
    }
    std::cout << set.image_key << "\t" << fp.nnz() << "\n";
  }
  std::cerr << "wrote " << sets.size() << " fingerprints to " << out_dir
            << "\n";
  return kExitOk;
}

// --- index -------------------------------------------------------------------

int cmd_index(const std::string& catalog_path,
              const std::string& detections_path, const std::string& out_path,
              const HyperFlags& flags) {
  const auto hp = flags.resolve();
  const auto catalog = svmf::load_catalog(catalog_path);
  const auto sets = svmf::parse_detections_file(detections_path);
  svmf::FingerprintIndex idx;
  for (const auto& set : sets) {
    idx.add(set.image_key,
            fingerprint_set(set, catalog, hp, flags.score_threshold));
  }
  svmf::index_save(idx, out_path);
  std::cout << "indexed " << idx.size() << " fingerprints (n=" << idx.n()
            << ") -> " << out_path << "\n";
  return kExitOk;
}

// --- search / rank -----------------------------------------------------------

int cmd_search(const std::string& index_path, const std::string& query_path,
               std::size_t k) {
  const auto idx = svmf::index_load(index_path);
  const auto query = svmf::load_svmf_auto(query_path);
  for (const auto& result : idx.search(query, k)) {
    std::cout << result.rank << "\t" << result.key << "\t"
              << format_score(result.score) << "\n";
  }
  return kExitOk;
}

int cmd_rank(const std::string& index_path, const std::string& query_path,
             const std::string& target_key) {
  const auto idx = svmf::index_load(index_path);
  const auto query = svmf::load_svmf_auto(query_path);
  std::cout << idx.rank_of(query, target_key) << "\n";
  return kExitOk;
}

// --- eval-detect ---------------------------------------------------------------

int cmd_eval_detect(const std::string& input_path,
                    const std::string& out_path) {
  const auto records = svmf::parse_eval_records_file(input_path);
  const auto report = svmf::aggregate_detection_report(records);

  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %8s %8s\n", "records", "S-F1",
                "M-EM");
  std::cout << line;
  std::snprintf(line, sizeof(line), "%-10zu %8.1f %8.1f\n",
                report.record_count, report.mean_s_f1, report.m_em);
  std::cout << line;

  const json report_json = {{"records", report.record_count},
                            {"mean_s_f1", report.mean_s_f1},
                            {"m_em", report.m_em}};
  if (!out_path.empty()) {
    write_text_atomic(out_path, report_json.dump(2) + "\n");
  } else {
    std::cout << report_json.dump() << "\n";
  }
  return kExitOk;
}

// --- eval-retrieval -------------------------------------------------------------

int eval_bundle(const std::string& bundle_dir,
                const std::string& catalog_path, const HyperFlags& flags,
                bool hyperparams_overridden, const std::string& out_path) {
  std::ifstream manifest_in(fs::path(bundle_dir) / "manifest.json");
  if (!manifest_in) {
    throw svmf::Error("cannot open bundle manifest in " + bundle_dir);
  }
  json manifest;
  try {
    manifest = json::parse(manifest_in);
  } catch (const json::parse_error& e) {
    throw svmf::FormatError(std::string("bad manifest: ") + e.what());
  }

  const auto catalog = svmf::load_catalog(catalog_path);
  if (catalog.size() != manifest.at("n").get<std::size_t>()) {
    throw svmf::ComparisonError(
        "catalog size does not match the bundle's n=" +
        std::to_string(manifest.at("n").get<std::size_t>()));
  }

  // The bundle's hyperparameters produced the query fingerprints; reuse
  // them for the index side unless flags explicitly override.
  svmf::Hyperparams hp;
  if (hyperparams_overridden) {
    hp = flags.resolve();
  } else {
    const auto& stored = manifest.at("hyperparams");
    hp.h1 = stored.at("h1").get<double>();
    hp.h2_table = stored.at("h2_table").get<std::vector<double>>();
    hp.distance_cap = stored.at("distance_cap").get<int>();
    hp.carbon_divisor = stored.at("carbon_divisor").get<double>();
    hp.expansion_factor = stored.at("expansion_factor").get<double>();
    hp.validate();
  }

  struct QueryRef {
    std::string key;
    std::string target_key;
    svmf::SVMF fingerprint;
  };
  std::vector<QueryRef> queries;
  for (const auto& entry : manifest.at("queries")) {
    QueryRef query;
    query.key = entry.at("key").get<std::string>();
    query.target_key = entry.at("target_key").get<std::string>();
    query.fingerprint = svmf::load_svmf_auto(
        (fs::path(bundle_dir) / entry.at("file").get<std::string>()).string());
    queries.push_back(std::move(query));
  }

  json level_reports = json::array();
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %10s %8s\n", "level", "mean-rank",
                "queries");
  std::cout << line;
  for (const auto& level : manifest.at("levels")) {
    const auto name = level.at("name").get<std::string>();
    const auto sets = svmf::parse_detections_file(
        (fs::path(bundle_dir) / level.at("index_file").get<std::string>())
            .string());
    svmf::FingerprintIndex idx;
    for (const auto& set : sets) {
      idx.add(set.image_key,
              fingerprint_set(set, catalog, hp, flags.score_threshold));
    }
    json ranks = json::array();
    double rank_sum = 0.0;
    for (const auto& query : queries) {
      const auto rank = idx.rank_of(query.fingerprint, query.target_key);
      ranks.push_back(rank);
      rank_sum += static_cast<double>(rank);
    }
    const double mean_rank = rank_sum / static_cast<double>(queries.size());
    std::snprintf(line, sizeof(line), "%-12s %10.2f %8zu\n", name.c_str(),
                  mean_rank, queries.size());
    std::cout << line;
    level_reports.push_back(
        {{"name", name}, {"mean_rank", mean_rank}, {"ranks", ranks}});
  }

  const json report = {{"levels", level_reports},
                       {"query_count", queries.size()}};
  if (!out_path.empty()) {
    write_text_atomic(out_path, report.dump(2) + "\n");
  } else {
    std::cout << report.dump() << "\n";
  }
  return kExitOk;
}

int eval_queries(const std::string& index_path,
                 const std::string& queries_path,
                 const std::string& out_path) {
  const auto idx = svmf::index_load(index_path);
  const auto queries = svmf::parse_retrieval_queries_file(queries_path);
  const double mean = svmf::average_rank(queries, idx);

  char line[128];
  std::snprintf(line, sizeof(line), "%-10s %10s\n", "queries", "mean-rank");
  std::cout << line;
  std::snprintf(line, sizeof(line), "%-10zu %10.2f\n", queries.size(), mean);
  std::cout << line;

  const json report = {{"query_count", queries.size()}, {"mean_rank", mean}};
  if (!out_path.empty()) {
    write_text_atomic(out_path, report.dump(2) + "\n");
  } else {
    std::cout << report.dump() << "\n";
  }
  return kExitOk;
}

// --- gen ----------------------------------------------------------------------

svmf::PerturbationParams parse_level(const std::string& text) {
  svmf::PerturbationParams params;
  double jitter = 0.0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &params.drop_prob,
                  &params.substitute_prob, &jitter) != 3) {
    throw svmf::ValidationError("level must be drop,substitute,jitter: '" +
                                text + "'");
  }
  params.jitter_frac = jitter;
  params.validate();
  return params;
}

int cmd_gen(const std::string& catalog_path, const std::string& out_dir,
            int bases, int variants, std::uint64_t seed,
            const std::vector<std::string>& level_specs,
            const std::vector<std::int32_t>& class_pool, int instances_min,
            int instances_max, double canvas, double box_size, double density,
            const HyperFlags& flags) {
  const auto hp = flags.resolve();
  const auto catalog = svmf::load_catalog(catalog_path);

  svmf::SynthSpec spec;
  spec.instance_count_min = instances_min;
  spec.instance_count_max = instances_max;
  spec.canvas_width = canvas;
  spec.canvas_height = canvas;
  spec.mean_box_size = box_size;
  spec.overlap_density = density;
  if (!class_pool.empty()) {
    spec.class_pool = class_pool;
  } else {
    for (std::size_t id = 0; id < catalog.size(); ++id) {
      spec.class_pool.push_back(static_cast<std::int32_t>(id));
    }
  }

  std::vector<svmf::PerturbationParams> levels;
  if (level_specs.empty()) {
    levels = svmf::reference_perturbation_levels();
  } else {
    for (const auto& text : level_specs) {
      levels.push_back(parse_level(text));
    }
  }

  const auto bench =
      svmf::build_benchmark(spec, bases, variants, levels, seed, catalog, hp);
  svmf::write_benchmark(bench, out_dir);
  std::cout << "bundle " << out_dir << ": " << bench.queries.size()
            << " bases, " << bench.variants_per_base << " variants, "
            << bench.levels.size() << " levels\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Substructure visual molecular fingerprinting engine"};
  app.require_subcommand(1);

  std::string catalog_path;
  std::string detections_path;
  std::string out_path;
  std::string index_path;
  std::string query_path;
  std::string queries_path;
  std::string bundle_dir;
  std::string input_path;
  std::string target_key;
  std::string format = "bin";
  std::size_t top_k = 10;
  int bases = 20;
  int variants = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> level_specs;
  std::vector<std::int32_t> class_pool;
  int instances_min = 5;
  int instances_max = 12;
  double canvas = 1024.0;
  double box_size = 120.0;
  double density = 0.9;

  HyperFlags fingerprint_flags;
  HyperFlags index_flags;
  HyperFlags retrieval_flags;
  HyperFlags gen_flags;

  auto* fingerprint_cmd = app.add_subcommand(
      "fingerprint", "Convert detection sets to fingerprint files");
  fingerprint_cmd->add_option("--catalog", catalog_path)->required();
  fingerprint_cmd->add_option("--detections", detections_path)->required();
  fingerprint_cmd->add_option("--out", out_path, "Output directory")->required();
  fingerprint_cmd->add_option("--format", format)
      ->check(CLI::IsMember({"bin", "json"}));
  fingerprint_flags.attach(fingerprint_cmd);

  auto* index_cmd =
      app.add_subcommand("index", "Build a fingerprint index from detections");
  index_cmd->add_option("--catalog", catalog_path)->required();
  index_cmd->add_option("--detections", detections_path)->required();
  index_cmd->add_option("--out", out_path, "Index file path")->required();
  index_flags.attach(index_cmd);

  auto* search_cmd =
      app.add_subcommand("search", "Rank index entries against a query");
  search_cmd->add_option("--index", index_path)->required();
  search_cmd->add_option("--query", query_path)->required();
  search_cmd->add_option("-k,--top", top_k, "Result count")
      ->check(CLI::PositiveNumber);

  auto* rank_cmd =
      app.add_subcommand("rank", "Report the rank of a target key");
  rank_cmd->add_option("--index", index_path)->required();
  rank_cmd->add_option("--query", query_path)->required();
  rank_cmd->add_option("--target", target_key)->required();

  auto* eval_detect_cmd = app.add_subcommand(
      "eval-detect", "Substructure F1 and exact-match metrics");
  eval_detect_cmd->add_option("--input", input_path)->required();
  eval_detect_cmd->add_option("--out", out_path, "JSON report path");

  auto* eval_retrieval_cmd = app.add_subcommand(
      "eval-retrieval", "Mean retrieval rank over a bundle or query list");
  eval_retrieval_cmd->add_option("--bundle", bundle_dir);
  eval_retrieval_cmd->add_option("--catalog", catalog_path);
  eval_retrieval_cmd->add_option("--index", index_path);
  eval_retrieval_cmd->add_option("--queries", queries_path);
  eval_retrieval_cmd->add_option("--out", out_path, "JSON report path");
  retrieval_flags.attach(eval_retrieval_cmd);

  auto* gen_cmd =
      app.add_subcommand("gen", "Generate a synthetic retrieval bundle");
  gen_cmd->add_option("--catalog", catalog_path)->required();
  gen_cmd->add_option("--out", out_path, "Bundle directory")->required();
  gen_cmd->add_option("--bases", bases)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--variants", variants)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", seed);
  gen_cmd->add_option("--level", level_specs,
                      "drop,substitute,jitter (repeatable; default: the three "
                      "reference levels)");
  gen_cmd->add_option("--classes", class_pool, "Class pool (default: all)")
      ->delimiter(',');
  gen_cmd->add_option("--instances-min", instances_min);
  gen_cmd->add_option("--instances-max", instances_max);
  gen_cmd->add_option("--canvas", canvas);
  gen_cmd->add_option("--box-size", box_size);
  gen_cmd->add_option("--density", density);
  gen_flags.attach(gen_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (fingerprint_cmd->parsed()) {
      return cmd_fingerprint(catalog_path, detections_path, out_path, format,
                             fingerprint_flags);
    }
    if (index_cmd->parsed()) {
      return cmd_index(catalog_path, detections_path, out_path, index_flags);
    }
    if (search_cmd->parsed()) {
      return cmd_search(index_path, query_path, top_k);
    }
    if (rank_cmd->parsed()) {
      return cmd_rank(index_path, query_path, target_key);
    }
    if (eval_detect_cmd->parsed()) {
      return cmd_eval_detect(input_path, out_path);
    }
    if (eval_retrieval_cmd->parsed()) {
      if (!bundle_dir.empty()) {
        if (catalog_path.empty()) {
          std::cerr << "error: --bundle requires --catalog\n";
          return kExitUsage;
        }
        const bool overridden =
            eval_retrieval_cmd->count("--h1") != 0 ||
            eval_retrieval_cmd->count("--h2") != 0 ||
            eval_retrieval_cmd->count("--cap") != 0 ||
            eval_retrieval_cmd->count("--carbon-divisor") != 0 ||
            eval_retrieval_cmd->count("--expansion") != 0;
        return eval_bundle(bundle_dir, catalog_path, retrieval_flags,
                           overridden, out_path);
      }
      if (!index_path.empty() && !queries_path.empty()) {
        return eval_queries(index_path, queries_path, out_path);
      }
      std::cerr << "error: need --bundle or both --index and --queries\n";
      return kExitUsage;
    }
    if (gen_cmd->parsed()) {
      return cmd_gen(catalog_path, out_path, bases, variants, seed,
                     level_specs, class_pool, instances_min, instances_max,
                     canvas, box_size, density, gen_flags);
    }
  } catch (const svmf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
