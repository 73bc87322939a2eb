#ifndef AZINORM_MERGE_HPP_
#define AZINORM_MERGE_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "azinorm/geom.hpp"
#include "azinorm/patching.hpp"
#include "azinorm/perceive.hpp"

namespace azinorm {

// Sentinel class id for scene points no surviving patch covers.
inline constexpr int kUnknownLabel = -1;

/// Scene-level output: merged boxes in the LiDAR frame and, for segmentation,
/// one averaged probability row plus one label per scene point.
struct ScenePrediction {
  std::vector<OrientedBox> boxes;
  std::vector<std::vector<double>> point_probs;
  std::vector<int> point_labels;
};

/// CCW vertex loop; area by the shoelace formula is >= 0.
using ConvexPolygon = std::vector<Vec2>;

double polygon_area(const ConvexPolygon& poly);

// The 4 BEV corners of a box, counter-clockwise, starting from the corner at
// local (+length/2, +width/2).
ConvexPolygon box_corners_bev(const OrientedBox& b);

// Intersection of two convex CCW polygons (Sutherland-Hodgman: clip `subject`
// against each half-plane of `clip`).
ConvexPolygon clip_convex(const ConvexPolygon& subject,
                          const ConvexPolygon& clip);

// BEV intersection-over-union by polygon clipping; 0 when the union is empty.
double rotated_iou_bev(const OrientedBox& a, const OrientedBox& b);

// Greedy NMS. Boxes are ordered by (score desc, cx, cy, yaw asc) before the
// sweep so the result is schedule-independent; a remaining box is suppressed
// when its IoU with a kept box exceeds `iou_threshold` (same class only when
// `class_aware`). Kept boxes come out in sweep order.
std::vector<OrientedBox> nms(const std::vector<OrientedBox>& boxes,
                             double iou_threshold, bool class_aware = true);

// Inverse-normalizes every patch box through its patch transform,
// concatenates and runs NMS.
ScenePrediction merge_detections(
    const std::vector<std::pair<NormTransform, PatchPrediction>>& per_patch,
    double iou_threshold, bool class_aware = true);

// Per-point mean of the probability rows of every covering patch, routed by
// patch point_indices. Uncovered points get a zero row and kUnknownLabel;
// covered points get the argmax label (lowest class index on ties). Throws
// io-style contract errors naming the patch on row-count mismatch.
ScenePrediction merge_segmentation(
    const std::vector<std::pair<const Patch*, PatchPrediction>>& per_patch,
    std::size_t scene_point_count, std::size_t n_classes);

}  // namespace azinorm

#endif  // AZINORM_MERGE_HPP_
