#include <doctest.h>

#include <sstream>

#include "svmf/errors.hpp"
#include "svmf/evaluation.hpp"

using namespace svmf;

namespace {

SubstructureMultiset multiset(std::map<std::int32_t, std::int64_t> counts) {
  SubstructureMultiset m;
  m.counts = std::move(counts);
  return m;
}

EvalRecord record(std::map<std::int32_t, std::int64_t> pred,
                  std::map<std::int32_t, std::int64_t> gt) {
  EvalRecord r;
  r.molecule_key = "mol";
  r.predicted = multiset(std::move(pred));
  r.ground_truth = multiset(std::move(gt));
  return r;
}

}  // namespace

TEST_CASE("substructure f1 hand values") {
  CHECK(substructure_f1(multiset({{0, 1}, {1, 1}}), multiset({{0, 1}, {1, 1}})) ==
        1.0);
  CHECK(substructure_f1(multiset({{0, 2}}), multiset({{0, 1}})) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(substructure_f1(multiset({}), multiset({{0, 1}})) == 0.0);
  CHECK(substructure_f1(multiset({{0, 1}}), multiset({})) == 0.0);
  CHECK(substructure_f1(multiset({}), multiset({})) == 1.0);
  CHECK(substructure_f1(multiset({{0, 1}}), multiset({{1, 1}})) == 0.0);
}

TEST_CASE("f1 is symmetric and 1 exactly on equal multisets") {
  const std::vector<std::pair<std::map<std::int32_t, std::int64_t>,
                              std::map<std::int32_t, std::int64_t>>>
      cases = {
          {{{0, 2}, {3, 1}}, {{0, 1}, {3, 4}}},
          {{{1, 5}}, {{1, 5}, {2, 1}}},
          {{}, {{4, 2}}},
          {{{7, 1}}, {{7, 1}}},
      };
  for (const auto& [a, b] : cases) {
    const double ab = substructure_f1(multiset(a), multiset(b));
    const double ba = substructure_f1(multiset(b), multiset(a));
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK((ab == 1.0) == (a == b));
  }
}

TEST_CASE("molecule exact match percentage") {
  std::vector<EvalRecord> records{
      record({{0, 1}}, {{0, 1}}),          // perfect
      record({{1, 2}}, {{1, 2}}),          // perfect
      record({{0, 1}}, {{1, 1}}),          // miss
      record({{0, 2}}, {{0, 1}}),          // partial
  };
  CHECK(molecule_exact_match(records) == 50.0);
  CHECK(molecule_exact_match({records[0]}) == 100.0);
  CHECK(molecule_exact_match({records[2]}) == 0.0);
  CHECK_THROWS_AS(molecule_exact_match({}), ValidationError);
}

TEST_CASE("detection report aggregates macro-averaged f1") {
  auto perfect = record({{0, 1}}, {{0, 1}});
  auto report1 = aggregate_detection_report({perfect});
  CHECK(report1.mean_s_f1 == 100.0);
  CHECK(report1.m_em == 100.0);

  auto half = record({{0, 1}, {1, 1}}, {{0, 1}, {2, 1}});  // F1 = 0.5
  auto report2 = aggregate_detection_report({perfect, half});
  CHECK(report2.mean_s_f1 == doctest::Approx(75.0).epsilon(1e-12));
  CHECK(report2.m_em == 50.0);

  auto zero = record({{0, 1}}, {{1, 1}});
  auto report3 = aggregate_detection_report({zero, zero});
  CHECK(report3.mean_s_f1 == 0.0);
  CHECK(report3.m_em == 0.0);

  CHECK_THROWS_AS(aggregate_detection_report({}), ValidationError);
}

TEST_CASE("eval records parse from JSONL") {
  std::istringstream in(
      R"({"molecule_key": "m1", "predicted": {"0": 1, "3": 2}, "ground_truth": {"0": 1}})"
      "\n"
      R"({"molecule_key": "m2", "predicted": {}, "ground_truth": {}})"
      "\n");
  auto records = parse_eval_records(in);
  REQUIRE(records.size() == 2);
  CHECK(records[0].predicted.counts.at(3) == 2);
  CHECK(records[0].predicted.total() == 3);
  CHECK(records[1].ground_truth.empty());

  std::istringstream bad_count(
      R"({"molecule_key": "m", "predicted": {"0": 0}, "ground_truth": {}})");
  CHECK_THROWS_AS(parse_eval_records(bad_count), ValidationError);

  std::istringstream bad_key(
      R"({"molecule_key": "m", "predicted": {"x": 1}, "ground_truth": {}})");
  CHECK_THROWS_AS(parse_eval_records(bad_key), ValidationError);

  std::istringstream bad_json("{oops");
  CHECK_THROWS_AS(parse_eval_records(bad_json), ParseError);
}

TEST_CASE("average rank over hand-built index") {
  FingerprintIndex idx;
  idx.add("a", SVMF(12, {{5, 10.0}}));
  idx.add("b", SVMF(12, {{5, 30.0}}));
  idx.add("c", SVMF(12, {{7, 10.0}}));

  std::vector<RetrievalQuery> queries;
  queries.push_back({"a", SVMF(12, {{5, 10.0}})});  // rank 1 (exact)
  CHECK(average_rank(queries, idx) == 1.0);

  queries.push_back({"c", SVMF(12, {{5, 10.0}})});  // rank 3
  CHECK(average_rank(queries, idx) == 2.0);

  std::vector<RetrievalQuery> missing{{"zz", SVMF(12, {{5, 10.0}})}};
  CHECK_THROWS_AS(average_rank(missing, idx), LookupError);
  CHECK_THROWS_AS(average_rank({}, idx), ValidationError);
}

TEST_CASE("query list JSONL parses fingerprints") {
  std::istringstream in(
      R"({"target_key": "t1", "query_fp": {"n": 12, "entries": {"5": 10.0}}})"
      "\n");
  auto queries = parse_retrieval_queries(in);
  REQUIRE(queries.size() == 1);
  CHECK(queries[0].target_key == "t1");
  CHECK(queries[0].query_fp.n() == 12);
  CHECK(queries[0].query_fp.nnz() == 1);

  std::istringstream missing_fp(R"({"target_key": "t1"})");
  CHECK_THROWS_AS(parse_retrieval_queries(missing_fp), ValidationError);
}
