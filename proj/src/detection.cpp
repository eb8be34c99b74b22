#include "svmf/detection.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "svmf/errors.hpp"

namespace svmf {

using nlohmann::json;

double BoundingBox::diagonal() const {
  const double w = width();
  const double h = height();
  return std::sqrt(w * w + h * h);
}

namespace {

BoundingBox parse_box(const json& arr) {
  if (!arr.is_array() || arr.size() != 4) {
    throw ValidationError("box must be [x_min, y_min, x_max, y_max]");
  }
  for (const auto& v : arr) {
    if (!v.is_number()) {
      throw ValidationError("box coordinates must be numbers");
    }
  }
  BoundingBox box{arr[0].get<double>(), arr[1].get<double>(),
                  arr[2].get<double>(), arr[3].get<double>()};
  if (box.x_min > box.x_max || box.y_min > box.y_max) {
    throw ValidationError("box has min > max");
  }
  if (!std::isfinite(box.x_min) || !std::isfinite(box.y_min) ||
      !std::isfinite(box.x_max) || !std::isfinite(box.y_max)) {
    throw ValidationError("box coordinates must be finite");
  }
  return box;
}

DetectionSet parse_detection_set(const json& obj) {
  if (!obj.is_object()) {
    throw ValidationError("detection record must be an object");
  }
  DetectionSet set;
  if (!obj.contains("image_key") || !obj.at("image_key").is_string()) {
    throw ValidationError("image_key must be a string");
  }
  set.image_key = obj.at("image_key").get<std::string>();
  if (!obj.contains("instances") || !obj.at("instances").is_array()) {
    throw ValidationError("instances must be an array");
  }
  std::unordered_set<std::int64_t> seen_ids;
  for (const auto& inst_json : obj.at("instances")) {
    DetectionInstance inst;
    if (!inst_json.contains("instance_id") ||
        !inst_json.at("instance_id").is_number_integer()) {
      throw ValidationError("instance_id must be an integer");
    }
    inst.instance_id = inst_json.at("instance_id").get<std::int64_t>();
    if (!seen_ids.insert(inst.instance_id).second) {
      throw ValidationError("duplicate instance_id " +
                            std::to_string(inst.instance_id) + " in set '" +
                            set.image_key + "'");
    }
    if (!inst_json.contains("class_id") ||
        !inst_json.at("class_id").is_number_integer()) {
      throw ValidationError("class_id must be an integer");
    }
    inst.class_id = inst_json.at("class_id").get<std::int32_t>();
    if (inst.class_id < 0) {
      throw ValidationError("class_id must be nonnegative");
    }
    if (inst_json.contains("score")) {
      if (!inst_json.at("score").is_number()) {
        throw ValidationError("score must be a number");
      }
      inst.score = inst_json.at("score").get<double>();
    }
    if (!(inst.score >= 0.0 && inst.score <= 1.0)) {
      throw ValidationError("score must be in [0, 1], got " +
                            std::to_string(inst.score));
    }
    if (!inst_json.contains("box")) {
      throw ValidationError("instance is missing box");
    }
    inst.box = parse_box(inst_json.at("box"));
    set.instances.push_back(std::move(inst));
  }
  return set;
}

}  // namespace

std::vector<DetectionSet> parse_detections(std::istream& in) {
  std::vector<DetectionSet> sets;
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
      sets.push_back(parse_detection_set(obj));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return sets;
}

std::vector<DetectionSet> parse_detections_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open detections: " + path);
  }
  return parse_detections(in);
}

std::string detection_set_to_json_line(const DetectionSet& set) {
  json instances = json::array();
  for (const auto& inst : set.instances) {
    instances.push_back(
        {{"instance_id", inst.instance_id},
         {"class_id", inst.class_id},
         {"score", inst.score},
         {"box", {inst.box.x_min, inst.box.y_min, inst.box.x_max,
                  inst.box.y_max}}});
  }
  json obj = {{"image_key", set.image_key}, {"instances", instances}};
  return obj.dump();
}

void write_detections(std::ostream& out, const std::vector<DetectionSet>& sets) {
  for (const auto& set : sets) {
    out << detection_set_to_json_line(set) << '\n';
  }
}

double expansion_margin(const DetectionSet& set, double factor) {
  if (set.instances.empty()) {
    throw ValidationError("expansion margin is undefined for an empty set");
  }
  double min_diagonal = std::numeric_limits<double>::infinity();
  for (const auto& inst : set.instances) {
    min_diagonal = std::min(min_diagonal, inst.box.diagonal());
  }
  return factor * min_diagonal;
}

BoundingBox expand_box(const BoundingBox& box, double margin) {
  return BoundingBox{box.x_min - margin, box.y_min - margin,
                     box.x_max + margin, box.y_max + margin};
}

bool boxes_overlap(const BoundingBox& a, const BoundingBox& b) {
  if (a.empty() || b.empty()) {
    return false;
  }
  return a.x_min <= b.x_max && b.x_min <= a.x_max && a.y_min <= b.y_max &&
         b.y_min <= a.y_max;
}

DetectionSet apply_score_threshold(const DetectionSet& set, double threshold) {
  DetectionSet filtered;
  filtered.image_key = set.image_key;
  for (const auto& inst : set.instances) {
    if (inst.score >= threshold) {
      filtered.instances.push_back(inst);
    }
  }
  return filtered;
}

}  // namespace svmf
