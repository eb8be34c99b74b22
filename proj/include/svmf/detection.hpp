#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace svmf {

// Axis-aligned box in real pixel coordinates. Closed intervals: boxes that
// share only an edge or a corner still count as overlapping. A box whose
// min exceeds its max (possible after shrinking) is empty.
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool empty() const { return x_min > x_max || y_min > y_max; }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diagonal() const;
};

struct DetectionInstance {
  std::int64_t instance_id = 0;
  std::int32_t class_id = 0;
  BoundingBox box;
  double score = 1.0;
};

// One image's worth of detections. May be empty.
struct DetectionSet {
  std::string image_key;
  std::vector<DetectionInstance> instances;
};

// Parses detection JSONL, one DetectionSet per line:
//   {"image_key": str, "instances": [{"instance_id": int, "class_id": int,
//    "score": float, "box": [x_min, y_min, x_max, y_max]}]}
// Order-preserving; invariant violations raise ValidationError naming the
// field, malformed JSON raises ParseError with the line number.
std::vector<DetectionSet> parse_detections(std::istream& in);
std::vector<DetectionSet> parse_detections_file(const std::string& path);

std::string detection_set_to_json_line(const DetectionSet& set);
void write_detections(std::ostream& out, const std::vector<DetectionSet>& sets);

// factor x the smallest box diagonal in the set. Errors on empty sets.
double expansion_margin(const DetectionSet& set, double factor);

// Moves every side outward by margin; negative margins shrink and may
// produce an empty box.
BoundingBox expand_box(const BoundingBox& box, double margin);

// Closed-interval intersection test; empty boxes overlap nothing.
bool boxes_overlap(const BoundingBox& a, const BoundingBox& b);

// Keeps instances with score >= threshold. The default threshold 0.0
// keeps everything.
DetectionSet apply_score_threshold(const DetectionSet& set, double threshold);

}  // namespace svmf
