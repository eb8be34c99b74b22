#include <doctest.h>

#include <cmath>
#include <sstream>

#include "svmf/detection.hpp"
#include "svmf/errors.hpp"
#include "svmf/rng.hpp"

#include "oracle.hpp"

using namespace svmf;

TEST_CASE("detections JSONL parses in order") {
  std::istringstream in(
      R"({"image_key": "img-1", "instances": [)"
      R"({"instance_id": 0, "class_id": 3, "score": 0.9, "box": [0, 0, 10, 10]},)"
      R"({"instance_id": 1, "class_id": 5, "score": 0.5, "box": [5, 5, 20, 18]}]})"
      "\n");
  auto sets = parse_detections(in);
  REQUIRE(sets.size() == 1);
  CHECK(sets[0].image_key == "img-1");
  REQUIRE(sets[0].instances.size() == 2);
  CHECK(sets[0].instances[0].class_id == 3);
  CHECK(sets[0].instances[1].box.y_max == doctest::Approx(18.0));
}

TEST_CASE("empty stream gives an empty list") {
  std::istringstream in("");
  CHECK(parse_detections(in).empty());
}

TEST_CASE("score outside [0,1] is rejected by name") {
  std::istringstream in(
      R"({"image_key": "x", "instances": [{"instance_id": 0, "class_id": 0, "score": 1.3, "box": [0,0,1,1]}]})");
  try {
    parse_detections(in);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("score") != std::string::npos);
  }
}

TEST_CASE("malformed JSON carries the line number") {
  std::istringstream in(
      "{\"image_key\": \"a\", \"instances\": []}\n"
      "{nope\n");
  try {
    parse_detections(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("duplicate instance ids are rejected") {
  std::istringstream in(
      R"({"image_key": "x", "instances": [)"
      R"({"instance_id": 7, "class_id": 0, "score": 0.5, "box": [0,0,1,1]},)"
      R"({"instance_id": 7, "class_id": 1, "score": 0.5, "box": [2,2,3,3]}]})");
  CHECK_THROWS_AS(parse_detections(in), ValidationError);
}

TEST_CASE("expansion margin uses the smallest diagonal") {
  DetectionSet set;
  set.image_key = "m";
  set.instances.push_back({0, 0, {0, 0, 30, 40}, 1.0});   // diagonal 50
  set.instances.push_back({1, 1, {0, 0, 60, 80}, 1.0});   // diagonal 100
  CHECK(expansion_margin(set, 0.1) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(expansion_margin(set, 0.0) == 0.0);

  DetectionSet single;
  single.instances.push_back({0, 0, {0, 0, 6, 8}, 1.0});  // diagonal 10
  CHECK(expansion_margin(single, 0.1) == doctest::Approx(1.0).epsilon(1e-12));

  DetectionSet empty;
  CHECK_THROWS_AS(expansion_margin(empty, 0.1), ValidationError);
}

TEST_CASE("margin scales with the coordinates") {
  SeededRng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    auto set = testing::random_detection_set(rng, 8, 5);
    const double base = expansion_margin(set, 0.1);
    for (double s : {0.5, 2.0, 8.0}) {
      DetectionSet scaled = set;
      for (auto& inst : scaled.instances) {
        inst.box = {inst.box.x_min * s, inst.box.y_min * s,
                    inst.box.x_max * s, inst.box.y_max * s};
      }
      // Powers of two scale the arithmetic exactly.
      CHECK(expansion_margin(scaled, 0.1) == base * s);
    }
    DetectionSet scaled = set;
    for (auto& inst : scaled.instances) {
      inst.box = {inst.box.x_min * 3.7, inst.box.y_min * 3.7,
                  inst.box.x_max * 3.7, inst.box.y_max * 3.7};
    }
    CHECK(expansion_margin(scaled, 0.1) ==
          doctest::Approx(base * 3.7).epsilon(1e-12));
  }
}

TEST_CASE("expand_box moves every side outward") {
  const BoundingBox box{0, 0, 10, 10};
  const BoundingBox grown = expand_box(box, 1.0);
  CHECK(grown.x_min == -1.0);
  CHECK(grown.y_min == -1.0);
  CHECK(grown.x_max == 11.0);
  CHECK(grown.y_max == 11.0);

  const BoundingBox same = expand_box(box, 0.0);
  CHECK(same.x_min == box.x_min);
  CHECK(same.x_max == box.x_max);

  CHECK(expand_box(box, -6.0).empty());
  CHECK_FALSE(expand_box(box, -5.0).empty());  // degenerate but not empty
}

TEST_CASE("expand then shrink restores the box when nothing degenerates") {
  SeededRng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    auto set = testing::random_detection_set(rng, 4, 3);
    const double margin = rng.uniform(0.0, 5.0);
    for (const auto& inst : set.instances) {
      const BoundingBox back = expand_box(expand_box(inst.box, margin), -margin);
      CHECK(back.x_min == doctest::Approx(inst.box.x_min).epsilon(1e-12));
      CHECK(back.x_max == doctest::Approx(inst.box.x_max).epsilon(1e-12));
    }
  }
}

TEST_CASE("overlap uses closed intervals") {
  CHECK(boxes_overlap({0, 0, 5, 5}, {5, 5, 9, 9}));       // corner touch
  CHECK(boxes_overlap({0, 0, 5, 5}, {5, 0, 9, 5}));       // edge touch
  CHECK_FALSE(boxes_overlap({0, 0, 5, 5}, {6, 0, 9, 5}));
  const BoundingBox empty = expand_box({0, 0, 10, 10}, -6.0);
  CHECK_FALSE(boxes_overlap({0, 0, 5, 5}, empty));
  CHECK_FALSE(boxes_overlap(empty, empty));
}

TEST_CASE("overlap is symmetric and reflexive on non-empty boxes") {
  SeededRng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    BoundingBox a{rng.uniform(0, 50), rng.uniform(0, 50), 0, 0};
    a.x_max = a.x_min + rng.uniform(0, 30);
    a.y_max = a.y_min + rng.uniform(0, 30);
    BoundingBox b{rng.uniform(0, 50), rng.uniform(0, 50), 0, 0};
    b.x_max = b.x_min + rng.uniform(0, 30);
    b.y_max = b.y_min + rng.uniform(0, 30);
    CHECK(boxes_overlap(a, b) == boxes_overlap(b, a));
    CHECK(boxes_overlap(a, a));
  }
}

TEST_CASE("score threshold filters instances") {
  DetectionSet set;
  set.image_key = "t";
  set.instances.push_back({0, 0, {0, 0, 1, 1}, 0.2});
  set.instances.push_back({1, 1, {0, 0, 1, 1}, 0.8});
  CHECK(apply_score_threshold(set, 0.0).instances.size() == 2);
  CHECK(apply_score_threshold(set, 0.5).instances.size() == 1);
  CHECK(apply_score_threshold(set, 0.5).instances[0].instance_id == 1);
}

TEST_CASE("detection JSONL round-trips through the writer") {
  SeededRng rng(5);
  auto set = testing::random_detection_set(rng, 6, 4);
  std::ostringstream out;
  write_detections(out, {set});
  std::istringstream in(out.str());
  auto parsed = parse_detections(in);
  REQUIRE(parsed.size() == 1);
  REQUIRE(parsed[0].instances.size() == set.instances.size());
  for (std::size_t i = 0; i < set.instances.size(); ++i) {
    CHECK(parsed[0].instances[i].instance_id == set.instances[i].instance_id);
    CHECK(parsed[0].instances[i].box.x_min == set.instances[i].box.x_min);
    CHECK(parsed[0].instances[i].score == set.instances[i].score);
  }
}
