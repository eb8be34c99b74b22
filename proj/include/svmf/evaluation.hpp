#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "svmf/retrieval.hpp"

namespace svmf {

// Per-molecule substructure counts; presence/absence evaluation only, no
// positions. Absent class means count 0.
struct SubstructureMultiset {
  std::map<std::int32_t, std::int64_t> counts;

  std::int64_t total() const;
  bool empty() const { return counts.empty(); }
};

struct EvalRecord {
  std::string molecule_key;
  SubstructureMultiset predicted;
  SubstructureMultiset ground_truth;
};

// Multiset F1 via per-class min counts. Both multisets empty scores 1.0,
// exactly one empty scores 0.0.
double substructure_f1(const SubstructureMultiset& pred,
                       const SubstructureMultiset& gt);

// Percentage of records whose S-F1 is exactly 1.
double molecule_exact_match(const std::vector<EvalRecord>& records);

struct DetectionReport {
  double mean_s_f1 = 0.0;  // macro-average of per-record S-F1, x100
  double m_em = 0.0;       // percentage
  std::size_t record_count = 0;
};

DetectionReport aggregate_detection_report(const std::vector<EvalRecord>& records);

// Eval JSONL, one record per line:
//   {"molecule_key": str, "predicted": {"<class_id>": count},
//    "ground_truth": {"<class_id>": count}}
std::vector<EvalRecord> parse_eval_records(std::istream& in);
std::vector<EvalRecord> parse_eval_records_file(const std::string& path);

struct RetrievalQuery {
  std::string target_key;
  SVMF query_fp;
};

// Query list JSONL: {"target_key": str, "query_fp": <SVMF JSON form>}
std::vector<RetrievalQuery> parse_retrieval_queries(std::istream& in);
std::vector<RetrievalQuery> parse_retrieval_queries_file(const std::string& path);

// Arithmetic mean of rank_of over the queries. Errors on empty input or
// missing target keys.
double average_rank(const std::vector<RetrievalQuery>& queries,
                    const FingerprintIndex& idx);

}  // namespace svmf
