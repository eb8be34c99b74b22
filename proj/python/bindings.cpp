#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svmf/catalog.hpp"
#include "svmf/detection.hpp"
#include "svmf/errors.hpp"
#include "svmf/evaluation.hpp"
#include "svmf/fingerprint.hpp"
#include "svmf/graph.hpp"
#include "svmf/retrieval.hpp"
#include "svmf/synth.hpp"

namespace py = pybind11;
using namespace svmf;

namespace {

BoundingBox box_from_tuple(const std::tuple<double, double, double, double>& t) {
  return BoundingBox{std::get<0>(t), std::get<1>(t), std::get<2>(t),
                     std::get<3>(t)};
}

SVMF fingerprint_detections(const DetectionSet& set, const Catalog& catalog,
                            const Hyperparams& hp, double score_threshold) {
  const auto filtered = score_threshold > 0.0
                            ? apply_score_threshold(set, score_threshold)
                            : set;
  return compute_svmf(build_graph(filtered, hp.expansion_factor), catalog, hp);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Substructure visual molecular fingerprinting engine";
#ifdef SVMF_VERSION
  m.attr("__version__") = SVMF_VERSION;
#else
  m.attr("__version__") = "dev";
#endif

  static py::exception<Error> exc_error(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", exc_error);
  py::register_exception<ValidationError>(m, "ValidationError", exc_error);
  py::register_exception<LookupError>(m, "LookupError", exc_error);
  py::register_exception<DomainError>(m, "DomainError", exc_error);
  py::register_exception<FormatError>(m, "FormatError", exc_error);
  py::register_exception<ConflictError>(m, "ConflictError", exc_error);
  py::register_exception<ComparisonError>(m, "ComparisonError", exc_error);
  py::register_exception<GenerationError>(m, "GenerationError", exc_error);

  py::enum_<SubstructureKind>(m, "Kind")
      .value("FUNCTIONAL_GROUP", SubstructureKind::kFunctionalGroup)
      .value("CARBON_BACKBONE", SubstructureKind::kCarbonBackbone);

  py::class_<SubstructureClass>(m, "SubstructureClass")
      .def(py::init([](std::int32_t class_id, SubstructureKind kind,
                       const std::string& name, const std::string& smarts) {
             return SubstructureClass{class_id, kind, name, smarts};
           }),
           py::arg("class_id"), py::arg("kind"), py::arg("name") = "",
           py::arg("smarts") = "")
      .def_readonly("class_id", &SubstructureClass::class_id)
      .def_readonly("kind", &SubstructureClass::kind)
      .def_readonly("name", &SubstructureClass::name)
      .def_readonly("smarts", &SubstructureClass::smarts);

  py::class_<Catalog>(m, "Catalog")
      .def_static("from_classes", &Catalog::from_classes)
      .def_static("load",
                  [](const std::string& path) { return load_catalog(path); })
      .def("__len__", &Catalog::size)
      .def("kind_of", &Catalog::kind_of)
      .def("contains", &Catalog::contains)
      .def_property_readonly("functional_group_count",
                             &Catalog::functional_group_count)
      .def_property_readonly("carbon_backbone_count",
                             &Catalog::carbon_backbone_count)
      .def_property_readonly("classes", &Catalog::classes);

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init([](double x_min, double y_min, double x_max, double y_max) {
             return BoundingBox{x_min, y_min, x_max, y_max};
           }),
           py::arg("x_min"), py::arg("y_min"), py::arg("x_max"),
           py::arg("y_max"))
      .def_readwrite("x_min", &BoundingBox::x_min)
      .def_readwrite("y_min", &BoundingBox::y_min)
      .def_readwrite("x_max", &BoundingBox::x_max)
      .def_readwrite("y_max", &BoundingBox::y_max)
      .def("empty", &BoundingBox::empty)
      .def("diagonal", &BoundingBox::diagonal);

  py::class_<DetectionInstance>(m, "DetectionInstance")
      .def(py::init([](std::int64_t instance_id, std::int32_t class_id,
                       const std::tuple<double, double, double, double>& box,
                       double score) {
             return DetectionInstance{instance_id, class_id,
                                      box_from_tuple(box), score};
           }),
           py::arg("instance_id"), py::arg("class_id"), py::arg("box"),
           py::arg("score") = 1.0)
      .def_readwrite("instance_id", &DetectionInstance::instance_id)
      .def_readwrite("class_id", &DetectionInstance::class_id)
      .def_readwrite("box", &DetectionInstance::box)
      .def_readwrite("score", &DetectionInstance::score);

  py::class_<DetectionSet>(m, "DetectionSet")
      .def(py::init([](const std::string& image_key,
                       std::vector<DetectionInstance> instances) {
             return DetectionSet{image_key, std::move(instances)};
           }),
           py::arg("image_key"), py::arg("instances"))
      .def_readwrite("image_key", &DetectionSet::image_key)
      .def_readwrite("instances", &DetectionSet::instances)
      .def("to_json_line", &detection_set_to_json_line);

  m.def("parse_detections_file", &parse_detections_file);
  m.def("expansion_margin", &expansion_margin);
  m.def("expand_box", &expand_box);
  m.def("boxes_overlap", &boxes_overlap);
  m.def("apply_score_threshold", &apply_score_threshold);

  py::class_<SubstructureGraph>(m, "SubstructureGraph")
      .def_property_readonly("image_key", &SubstructureGraph::image_key)
      .def("node_count", &SubstructureGraph::node_count)
      .def("edge_count", &SubstructureGraph::edge_count)
      .def("edges", &SubstructureGraph::sorted_edges)
      .def("to_json", &SubstructureGraph::to_json);

  m.def("build_graph", &build_graph, py::arg("detections"), py::arg("factor"));
  m.def(
      "instance_distance",
      [](const SubstructureGraph& g, std::int64_t a,
         std::int64_t b) -> std::optional<int> {
        return instance_distance(g, a, b);
      },
      "Intermediate-node count on the shortest path; None when disconnected");

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("h1", &Hyperparams::h1)
      .def_readwrite("h2_table", &Hyperparams::h2_table)
      .def_readwrite("distance_cap", &Hyperparams::distance_cap)
      .def_readwrite("carbon_divisor", &Hyperparams::carbon_divisor)
      .def_readwrite("expansion_factor", &Hyperparams::expansion_factor)
      .def("validate", &Hyperparams::validate);

  py::class_<SVMF>(m, "SVMF")
      .def(py::init<>())
      .def(py::init([](std::uint32_t n, const std::map<std::uint64_t, double>&
                                            entries) {
             return SVMF(n, entries);
           }),
           py::arg("n"), py::arg("entries"))
      .def_property_readonly("n", &SVMF::n)
      .def_property_readonly("key", &SVMF::key)
      .def("nnz", &SVMF::nnz)
      .def("entries",
           [](const SVMF& fp) {
             std::map<std::uint64_t, double> out(fp.entries().begin(),
                                                 fp.entries().end());
             return out;
           })
      .def("to_json", &SVMF::to_json)
      .def_static("from_json", &SVMF::from_json)
      .def("encode",
           [](const SVMF& fp) {
             const auto bytes = encode_svmf(fp);
             return py::bytes(reinterpret_cast<const char*>(bytes.data()),
                              bytes.size());
           })
      .def_static("decode",
                  [](const py::bytes& data) {
                    const std::string raw = data;
                    return decode_svmf(
                        std::vector<std::uint8_t>(raw.begin(), raw.end()));
                  })
      .def("save", &save_svmf)
      .def_static("load", &load_svmf_auto)
      .def("__eq__", [](const SVMF& a, const SVMF& b) { return a == b; })
      .def("__len__", &SVMF::nnz);

  m.def("linear_index", &linear_index);
  m.def("compute_svmf", &compute_svmf);
  m.def("fingerprint_detections", &fingerprint_detections,
        py::arg("detections"), py::arg("catalog"), py::arg("hyperparams"),
        py::arg("score_threshold") = 0.0);
  m.def(
      "svmf_from_matches",
      [](const std::vector<std::pair<std::int32_t,
                                     std::vector<std::int64_t>>>& matches,
         const std::optional<std::vector<std::pair<std::int64_t,
                                                   std::int64_t>>>& bonds,
         const Catalog& catalog, const Hyperparams& hp) {
        std::vector<SubstructureMatch> converted;
        converted.reserve(matches.size());
        for (const auto& [class_id, atoms] : matches) {
          converted.push_back({class_id, atoms});
        }
        return svmf_from_matches(converted, bonds ? &*bonds : nullptr, catalog,
                                 hp);
      },
      py::arg("matches"), py::arg("bonds"), py::arg("catalog"),
      py::arg("hyperparams"));

  m.def("similarity", &similarity);

  py::class_<RankedResult>(m, "RankedResult")
      .def_readonly("key", &RankedResult::key)
      .def_readonly("score", &RankedResult::score)
      .def_readonly("rank", &RankedResult::rank)
      .def("__repr__", [](const RankedResult& r) {
        return "RankedResult(rank=" + std::to_string(r.rank) + ", key='" +
               r.key + "', score=" + std::to_string(r.score) + ")";
      });

  py::class_<FingerprintIndex>(m, "FingerprintIndex")
      .def(py::init<>())
      .def("__len__", &FingerprintIndex::size)
      .def_property_readonly("n", &FingerprintIndex::n)
      .def("add", &FingerprintIndex::add)
      .def("contains", &FingerprintIndex::contains)
      .def("search", &FingerprintIndex::search, py::arg("query"),
           py::arg("k") = 10)
      .def("rank_of", &FingerprintIndex::rank_of)
      .def("keys",
           [](const FingerprintIndex& idx) {
             std::vector<std::string> keys;
             keys.reserve(idx.size());
             for (const auto& [key, fp] : idx.entries()) {
               keys.push_back(key);
             }
             return keys;
           })
      .def("save", &index_save)
      .def_static("load", &index_load);

  m.def("substructure_f1",
        [](const std::map<std::int32_t, std::int64_t>& pred,
           const std::map<std::int32_t, std::int64_t>& gt) {
          SubstructureMultiset p;
          p.counts = pred;
          SubstructureMultiset g;
          g.counts = gt;
          return substructure_f1(p, g);
        });
  m.def("detection_report",
        [](const std::vector<std::pair<std::map<std::int32_t, std::int64_t>,
                                       std::map<std::int32_t, std::int64_t>>>&
               pairs) {
          std::vector<EvalRecord> records;
          records.reserve(pairs.size());
          for (std::size_t i = 0; i < pairs.size(); ++i) {
            EvalRecord record;
            record.molecule_key = "record-" + std::to_string(i);
            record.predicted.counts = pairs[i].first;
            record.ground_truth.counts = pairs[i].second;
            records.push_back(std::move(record));
          }
          const auto report = aggregate_detection_report(records);
          return py::make_tuple(report.mean_s_f1, report.m_em);
        },
        "Returns (mean S-F1 x100, M-EM percentage)");

  py::class_<PerturbationParams>(m, "PerturbationParams")
      .def(py::init([](double drop_prob, double substitute_prob,
                       double jitter_frac, std::uint64_t seed) {
             return PerturbationParams{drop_prob, substitute_prob, jitter_frac,
                                       seed};
           }),
           py::arg("drop_prob") = 0.0, py::arg("substitute_prob") = 0.0,
           py::arg("jitter_frac") = 0.0, py::arg("seed") = 0)
      .def_readwrite("drop_prob", &PerturbationParams::drop_prob)
      .def_readwrite("substitute_prob", &PerturbationParams::substitute_prob)
      .def_readwrite("jitter_frac", &PerturbationParams::jitter_frac)
      .def_readwrite("seed", &PerturbationParams::seed);

  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("instance_count_min", &SynthSpec::instance_count_min)
      .def_readwrite("instance_count_max", &SynthSpec::instance_count_max)
      .def_readwrite("class_pool", &SynthSpec::class_pool)
      .def_readwrite("canvas_width", &SynthSpec::canvas_width)
      .def_readwrite("canvas_height", &SynthSpec::canvas_height)
      .def_readwrite("mean_box_size", &SynthSpec::mean_box_size)
      .def_readwrite("overlap_density", &SynthSpec::overlap_density);

  m.def("generate_base", &generate_base, py::arg("spec"), py::arg("seed"),
        py::arg("image_key") = "");
  m.def("perturb", &perturb);
  m.def("reference_perturbation_levels", &reference_perturbation_levels);
  m.def("build_benchmark", &build_benchmark, py::arg("spec"),
        py::arg("base_count"), py::arg("variants_per_base"), py::arg("levels"),
        py::arg("seed"), py::arg("catalog"), py::arg("hyperparams"));
  m.def("write_benchmark", &write_benchmark);

  py::class_<Benchmark>(m, "Benchmark")
      .def_readonly("seed", &Benchmark::seed)
      .def_readonly("n", &Benchmark::n)
      .def_readonly("variants_per_base", &Benchmark::variants_per_base)
      .def_property_readonly("query_keys", [](const Benchmark& bench) {
        std::vector<std::string> keys;
        for (const auto& query : bench.queries) {
          keys.push_back(query.key);
        }
        return keys;
      });
}
