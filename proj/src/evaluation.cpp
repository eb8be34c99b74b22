#include "svmf/evaluation.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "svmf/errors.hpp"

namespace svmf {

using nlohmann::json;

std::int64_t SubstructureMultiset::total() const {
  std::int64_t sum = 0;
  for (const auto& [class_id, count] : counts) {
    sum += count;
  }
  return sum;
}

double substructure_f1(const SubstructureMultiset& pred,
                       const SubstructureMultiset& gt) {
  std::int64_t matched = 0;
  for (const auto& [class_id, count] : pred.counts) {
    auto it = gt.counts.find(class_id);
    if (it != gt.counts.end()) {
      matched += std::min(count, it->second);
    }
  }
  const std::int64_t total_pred = pred.total();
  const std::int64_t total_gt = gt.total();
  if (total_pred == 0 && total_gt == 0) {
    return 1.0;
  }
  if (matched == total_pred && matched == total_gt) {
    // Multisets are identical; keep the score exactly 1.
    return 1.0;
  }
  if (matched == 0) {
    return 0.0;
  }
  const double precision =
      static_cast<double>(matched) / static_cast<double>(total_pred);
  const double recall =
      static_cast<double>(matched) / static_cast<double>(total_gt);
  return 2.0 * precision * recall / (precision + recall);
}

double molecule_exact_match(const std::vector<EvalRecord>& records) {
  if (records.empty()) {
    throw ValidationError("exact match is undefined for an empty record list");
  }
  std::size_t perfect = 0;
  for (const auto& record : records) {
    if (substructure_f1(record.predicted, record.ground_truth) == 1.0) {
      ++perfect;
    }
  }
  return 100.0 * static_cast<double>(perfect) /
         static_cast<double>(records.size());
}

DetectionReport aggregate_detection_report(const std::vector<EvalRecord>& records) {
  if (records.empty()) {
    throw ValidationError("detection report requires at least one record");
  }
  double f1_sum = 0.0;
  for (const auto& record : records) {
    f1_sum += substructure_f1(record.predicted, record.ground_truth);
  }
  DetectionReport report;
  report.record_count = records.size();
  report.mean_s_f1 = 100.0 * f1_sum / static_cast<double>(records.size());
  report.m_em = molecule_exact_match(records);
  return report;
}

namespace {

SubstructureMultiset parse_multiset(const json& obj, const char* field) {
  if (!obj.is_object()) {
    throw ValidationError(std::string(field) + " must be an object");
  }
  SubstructureMultiset multiset;
  for (const auto& [key, value] : obj.items()) {
    std::int32_t class_id = 0;
    try {
      std::size_t consumed = 0;
      class_id = std::stoi(key, &consumed);
      if (consumed != key.size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw ValidationError(std::string(field) + " has non-integer class key '" +
                            key + "'");
    }
    if (!value.is_number_integer()) {
      throw ValidationError(std::string(field) + " count for class " + key +
                            " must be an integer");
    }
    const auto count = value.get<std::int64_t>();
    if (count < 1) {
      throw ValidationError(std::string(field) + " count for class " + key +
                            " must be >= 1");
    }
    if (!multiset.counts.emplace(class_id, count).second) {
      throw ValidationError(std::string(field) + " repeats class " + key);
    }
  }
  return multiset;
}

}  // namespace

std::vector<EvalRecord> parse_eval_records(std::istream& in) {
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    try {
      EvalRecord record;
      if (!obj.contains("molecule_key") || !obj.at("molecule_key").is_string()) {
        throw ValidationError("molecule_key must be a string");
      }
      record.molecule_key = obj.at("molecule_key").get<std::string>();
      if (record.molecule_key.empty()) {
        throw ValidationError("molecule_key must be nonempty");
      }
      record.predicted = parse_multiset(obj.value("predicted", json::object()),
                                        "predicted");
      record.ground_truth = parse_multiset(
          obj.value("ground_truth", json::object()), "ground_truth");
      records.push_back(std::move(record));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<EvalRecord> parse_eval_records_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open eval records: " + path);
  }
  return parse_eval_records(in);
}

std::vector<RetrievalQuery> parse_retrieval_queries(std::istream& in) {
  std::vector<RetrievalQuery> queries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.contains("target_key") || !obj.at("target_key").is_string() ||
        !obj.contains("query_fp")) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": need target_key and query_fp");
    }
    RetrievalQuery query;
    query.target_key = obj.at("target_key").get<std::string>();
    try {
      query.query_fp = SVMF::from_json(obj.at("query_fp").dump());
    } catch (const FormatError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    queries.push_back(std::move(query));
  }
  return queries;
}

std::vector<RetrievalQuery> parse_retrieval_queries_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open queries: " + path);
  }
  return parse_retrieval_queries(in);
}

double average_rank(const std::vector<RetrievalQuery>& queries,
                    const FingerprintIndex& idx) {
  if (queries.empty()) {
    throw ValidationError("average rank requires at least one query");
  }
  double rank_sum = 0.0;
  for (const auto& query : queries) {
    rank_sum += static_cast<double>(idx.rank_of(query.query_fp, query.target_key));
  }
  return rank_sum / static_cast<double>(queries.size());
}

}  // namespace svmf
