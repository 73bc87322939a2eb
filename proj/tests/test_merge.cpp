#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "azinorm/merge.hpp"
#include "azinorm/rng.hpp"
#include "oracles.hpp"

using namespace azinorm;

namespace {

constexpr double kPi = std::numbers::pi;

OrientedBox make_box(double cx, double cy, double l, double w, double yaw,
                     double score = 1.0, int class_id = 0) {
  OrientedBox b;
  b.cx = cx;
  b.cy = cy;
  b.cz = 0.0;
  b.length = l;
  b.width = w;
  b.height = 1.0;
  b.yaw = yaw;
  b.score = score;
  b.class_id = class_id;
  return b;
}

OrientedBox random_box(Rng& rng, double extent = 10.0) {
  return make_box(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                  rng.uniform(0.5, 6.0), rng.uniform(0.5, 4.0),
                  wrap_angle(rng.uniform(-kPi, kPi)), rng.uniform01(),
                  static_cast<int>(rng.below(3)));
}

}  // namespace

TEST_CASE("box_corners_bev of the unit square at yaw 0") {
  const ConvexPolygon poly = box_corners_bev(make_box(0, 0, 1, 1, 0));
  REQUIRE(poly.size() == 4);
  CHECK(poly[0].x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(poly[0].y == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(poly[1].x == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(poly[1].y == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(poly[2].x == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(poly[2].y == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(poly[3].x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(poly[3].y == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(polygon_area(poly) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("box_corners_bev at yaw pi/2 is the same vertex set") {
  const ConvexPolygon poly =
      box_corners_bev(make_box(0, 0, 1, 1, kPi / 2));
  REQUIRE(poly.size() == 4);
  for (const Vec2& v : poly) {
    CHECK(std::abs(std::abs(v.x) - 0.5) <= 1e-12);
    CHECK(std::abs(std::abs(v.y) - 0.5) <= 1e-12);
  }
  CHECK(polygon_area(poly) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shoelace area equals length*width for random boxes") {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const OrientedBox b = random_box(rng);
    CHECK(polygon_area(box_corners_bev(b)) ==
          doctest::Approx(b.length * b.width).epsilon(1e-9));
  }
}

TEST_CASE("rotated_iou_bev analytic cases") {
  const OrientedBox unit = make_box(0, 0, 1, 1, 0);
  CHECK(rotated_iou_bev(unit, unit) == 1.0);

  // Unit squares offset by (0.5, 0): inter 0.5, union 1.5.
  CHECK(rotated_iou_bev(unit, make_box(0.5, 0, 1, 1, 0)) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // Concentric unit squares at 45 degrees: intersection is the regular
  // octagon of area 2*(sqrt(2)-1).
  const double inter = 2.0 * (std::sqrt(2.0) - 1.0);
  const double expected = inter / (2.0 - inter);
  CHECK(rotated_iou_bev(unit, make_box(0, 0, 1, 1, kPi / 4)) ==
        doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected == doctest::Approx(0.707107).epsilon(1e-6));

  // Disjoint boxes.
  CHECK(rotated_iou_bev(unit, make_box(10, 10, 1, 1, 0.3)) == 0.0);
}

TEST_CASE("rotated_iou_bev agrees with the Monte-Carlo oracle") {
  Rng rng(31415);
  for (int i = 0; i < 25; ++i) {
    OrientedBox a = random_box(rng, 3.0);
    OrientedBox b = random_box(rng, 3.0);
    const double exact = rotated_iou_bev(a, b);
    const double sampled = testing::monte_carlo_iou(a, b, 200000, 1000 + i);
    CHECK(std::abs(exact - sampled) <= 8e-3);
  }
}

TEST_CASE("IoU symmetry, self-unit and rigid invariance") {
  Rng rng(999);
  for (int i = 0; i < 300; ++i) {
    const OrientedBox a = random_box(rng, 5.0);
    const OrientedBox b = random_box(rng, 5.0);
    const double ab = rotated_iou_bev(a, b);
    const double ba = rotated_iou_bev(b, a);
    CHECK(std::abs(ab - ba) <= 1e-12);
    CHECK(rotated_iou_bev(a, a) == 1.0);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0 + 1e-12);

    const double phi = rng.uniform(-kPi, kPi);
    const Vec2 shift{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
    const auto move = [&](const OrientedBox& box) {
      OrientedBox out = rotate_box_z(box, phi);
      out.cx += shift.x;
      out.cy += shift.y;
      return out;
    };
    CHECK(std::abs(rotated_iou_bev(move(a), move(b)) - ab) <= 1e-9);
  }
}

TEST_CASE("nms trivial cases") {
  std::vector<OrientedBox> coincident{
      make_box(0, 0, 2, 1, 0.2, 0.9), make_box(0, 0, 2, 1, 0.2, 0.8),
      make_box(0, 0, 2, 1, 0.2, 0.7)};
  const auto kept = nms(coincident, 0.1);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score == 0.9);

  std::vector<OrientedBox> disjoint{make_box(0, 0, 1, 1, 0, 0.5),
                                    make_box(10, 0, 1, 1, 0, 0.9),
                                    make_box(20, 0, 1, 1, 0, 0.7)};
  const auto all = nms(disjoint, 0.1);
  REQUIRE(all.size() == 3);
  CHECK(all[0].score == 0.9);
  CHECK(all[1].score == 0.7);
  CHECK(all[2].score == 0.5);

  CHECK(nms({}, 0.5).empty());
  CHECK_THROWS_AS(nms({}, 1.5), std::invalid_argument);
}

TEST_CASE("nms is class-aware by default and class-blind on demand") {
  std::vector<OrientedBox> boxes{make_box(0, 0, 2, 1, 0, 0.9, 0),
                                 make_box(0, 0, 2, 1, 0, 0.8, 1)};
  CHECK(nms(boxes, 0.1, true).size() == 2);
  CHECK(nms(boxes, 0.1, false).size() == 1);
}

TEST_CASE("nms matches the independent reference on random sets") {
  Rng rng(5150);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<OrientedBox> boxes;
    const std::size_t n = 1 + rng.below(120);
    for (std::size_t i = 0; i < n; ++i) {
      boxes.push_back(random_box(rng, 8.0));
    }
    const double threshold = rng.uniform(0.05, 0.8);
    const bool class_aware = rng.below(2) == 0;
    const auto fast = nms(boxes, threshold, class_aware);
    const auto slow = testing::reference_nms(boxes, threshold, class_aware);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].cx == slow[i].cx);
      CHECK(fast[i].cy == slow[i].cy);
      CHECK(fast[i].score == slow[i].score);
      CHECK(fast[i].class_id == slow[i].class_id);
    }
    // Postconditions: the global max-score box survives, and kept same-class
    // pairs never exceed the threshold.
    double top_score = 0.0;
    for (const OrientedBox& b : boxes) {
      top_score = std::max(top_score, b.score);
    }
    REQUIRE(!fast.empty());
    CHECK(fast[0].score == top_score);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      for (std::size_t j = i + 1; j < fast.size(); ++j) {
        if (class_aware && fast[i].class_id != fast[j].class_id) {
          continue;
        }
        CHECK(rotated_iou_bev(fast[i], fast[j]) <= threshold);
      }
    }
  }
}

TEST_CASE("merge_detections basics") {
  // One patch, one box: back in the LiDAR frame.
  const auto t = NormTransform::for_center(Vec2{0.0, 10.0});
  PatchPrediction pred;
  pred.boxes.push_back(make_box(2, 0, 4, 2, 0, 0.9));
  const ScenePrediction merged = merge_detections({{t, pred}}, 0.1);
  REQUIRE(merged.boxes.size() == 1);
  CHECK(merged.boxes[0].cx == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(merged.boxes[0].cy == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(merged.boxes[0].yaw == doctest::Approx(kPi / 2).epsilon(1e-12));

  // The same object seen identically from 3 overlapping patches collapses
  // to one output box.
  const OrientedBox object = make_box(12.0, 8.0, 4.0, 2.0, 0.6, 0.8, 1);
  std::vector<std::pair<NormTransform, PatchPrediction>> per_patch;
  for (const Vec2 center : {Vec2{6.4, 6.4}, Vec2{12.8, 6.4}, Vec2{12.8, 12.8}}) {
    const auto transform = NormTransform::for_center(center);
    PatchPrediction p;
    p.boxes.push_back(normalize_box(transform, object));
    per_patch.push_back({transform, p});
  }
  const ScenePrediction dedup = merge_detections(per_patch, 0.1);
  REQUIRE(dedup.boxes.size() == 1);
  CHECK(dedup.boxes[0].cx == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(dedup.boxes[0].cy == doctest::Approx(8.0).epsilon(1e-9));
  CHECK(testing::yaw_distance_mod_pi(dedup.boxes[0].yaw, 0.6) <= 1e-9);

  CHECK(merge_detections({}, 0.1).boxes.empty());
}

TEST_CASE("merge_segmentation averages rows and labels the argmax") {
  // Two patches covering the same two points plus one uncovered point.
  Patch a;
  a.center = Vec2{0, 0};
  a.transform = NormTransform::for_center(a.center);
  a.point_indices = {0, 1};
  a.normalized_points.points.resize(2);
  Patch b = a;

  PatchPrediction pa;
  pa.point_probs = {{0.8, 0.2}, {0.5, 0.5}};
  PatchPrediction pb;
  pb.point_probs = {{0.6, 0.4}, {0.5, 0.5}};

  const ScenePrediction merged =
      merge_segmentation({{&a, pa}, {&b, pb}}, 3, 2);
  REQUIRE(merged.point_probs.size() == 3);
  CHECK(merged.point_probs[0][0] == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(merged.point_probs[0][1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(merged.point_labels[0] == 0);
  CHECK(merged.point_labels[1] == 0);  // tie goes to the lowest class index
  CHECK(merged.point_labels[2] == kUnknownLabel);
  CHECK(merged.point_probs[2] == std::vector<double>{0.0, 0.0});

  // Single-patch mean is the row itself.
  const ScenePrediction solo = merge_segmentation({{&a, pa}}, 3, 2);
  CHECK(solo.point_probs[0] == std::vector<double>{0.8, 0.2});
}

TEST_CASE("merge_segmentation rejects row-count mismatches naming the patch") {
  Patch a;
  a.center = Vec2{6.4, 0.0};
  a.transform = NormTransform::for_center(a.center);
  a.point_indices = {0, 1};
  a.normalized_points.points.resize(2);
  PatchPrediction bad;
  bad.point_probs = {{1.0, 0.0}};
  CHECK_THROWS_WITH_AS(merge_segmentation({{&a, bad}}, 2, 2),
                       doctest::Contains("6.4"), std::invalid_argument);
}

TEST_CASE("merged rows of covered points stay distributions") {
  Rng rng(2222);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n_points = 50;
    const std::size_t n_classes = 4;
    std::vector<Patch> patches(3);
    std::vector<std::pair<const Patch*, PatchPrediction>> per_patch;
    for (Patch& patch : patches) {
      patch.transform = NormTransform::for_center(Vec2{0, 0});
      for (std::size_t i = 0; i < n_points; ++i) {
        if (rng.below(2) == 0) {
          patch.point_indices.push_back(i);
        }
      }
      patch.normalized_points.points.resize(patch.point_indices.size());
      PatchPrediction pred;
      for (std::size_t i = 0; i < patch.point_indices.size(); ++i) {
        std::vector<double> row(n_classes, 0.0);
        double total = 0.0;
        for (double& v : row) {
          v = rng.uniform01() + 1e-6;
          total += v;
        }
        for (double& v : row) {
          v /= total;
        }
        pred.point_probs.push_back(row);
      }
      per_patch.push_back({&patch, pred});
    }
    const ScenePrediction merged =
        merge_segmentation(per_patch, n_points, n_classes);
    for (std::size_t i = 0; i < n_points; ++i) {
      if (merged.point_labels[i] == kUnknownLabel) {
        continue;
      }
      double sum = 0.0;
      for (double v : merged.point_probs[i]) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      // The label is the argmax with the lowest index on ties.
      std::size_t best = 0;
      for (std::size_t cls = 0; cls < n_classes; ++cls) {
        if (merged.point_probs[i][cls] > merged.point_probs[i][best]) {
          best = cls;
        }
      }
      CHECK(merged.point_labels[i] == static_cast<int>(best));
    }
  }
}
