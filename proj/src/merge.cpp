#include "azinorm/merge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace azinorm {

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

double polygon_area(const ConvexPolygon& poly) {
  if (poly.size() < 3) {
    return 0.0;
  }
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return twice / 2.0;
}

ConvexPolygon box_corners_bev(const OrientedBox& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hl = b.length / 2.0;
  const double hw = b.width / 2.0;
  // CCW from local (+l/2, +w/2).
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  ConvexPolygon poly;
  poly.reserve(4);
  for (int i = 0; i < 4; ++i) {
    poly.push_back(Vec2{b.cx + c * lx[i] - s * ly[i],
                        b.cy + s * lx[i] + c * ly[i]});
  }
  return poly;
}

ConvexPolygon clip_convex(const ConvexPolygon& subject,
                          const ConvexPolygon& clip) {
  ConvexPolygon output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % clip.size()];
    ConvexPolygon input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2 p = input[i];
      const Vec2 q = input[(i + 1) % input.size()];
      const double cp = cross(a, b, p);
      const double cq = cross(a, b, q);
      if (cp >= 0.0) {
        output.push_back(p);
        if (cq < 0.0) {
          const double t = cp / (cp - cq);
          output.push_back(Vec2{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
        }
      } else if (cq >= 0.0) {
        const double t = cp / (cp - cq);
        output.push_back(Vec2{p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
  }
  return output;
}

double rotated_iou_bev(const OrientedBox& a, const OrientedBox& b) {
  const ConvexPolygon pa = box_corners_bev(a);
  const ConvexPolygon pb = box_corners_bev(b);
  const double area_a = polygon_area(pa);
  const double area_b = polygon_area(pb);
  const double inter = polygon_area(clip_convex(pa, pb));
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) {
    return 0.0;
  }
  return inter / uni;
}

std::vector<OrientedBox> nms(const std::vector<OrientedBox>& boxes,
                             double iou_threshold, bool class_aware) {
  if (!(iou_threshold >= 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("nms: iou_threshold must be in [0, 1]");
  }
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&boxes](std::size_t i, std::size_t j) {
                     const OrientedBox& a = boxes[i];
                     const OrientedBox& b = boxes[j];
                     if (a.score != b.score) return a.score > b.score;
                     if (a.cx != b.cx) return a.cx < b.cx;
                     if (a.cy != b.cy) return a.cy < b.cy;
                     return a.yaw < b.yaw;
                   });
  std::vector<OrientedBox> kept;
  std::vector<bool> suppressed(boxes.size(), false);
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    if (suppressed[oi]) {
      continue;
    }
    const OrientedBox& best = boxes[order[oi]];
    kept.push_back(best);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      if (suppressed[oj]) {
        continue;
      }
      const OrientedBox& other = boxes[order[oj]];
      if (class_aware && other.class_id != best.class_id) {
        continue;
      }
      if (rotated_iou_bev(best, other) > iou_threshold) {
        suppressed[oj] = true;
      }
    }
  }
  return kept;
}

ScenePrediction merge_detections(
    const std::vector<std::pair<NormTransform, PatchPrediction>>& per_patch,
    double iou_threshold, bool class_aware) {
  std::vector<OrientedBox> all;
  for (const auto& [transform, pred] : per_patch) {
    for (const OrientedBox& b : pred.boxes) {
      all.push_back(denormalize_box(transform, b));
    }
  }
  ScenePrediction out;
  out.boxes = nms(all, iou_threshold, class_aware);
  return out;
}

ScenePrediction merge_segmentation(
    const std::vector<std::pair<const Patch*, PatchPrediction>>& per_patch,
    std::size_t scene_point_count, std::size_t n_classes) {
  std::vector<std::vector<double>> sums(scene_point_count,
                                        std::vector<double>(n_classes, 0.0));
  std::vector<std::size_t> cover(scene_point_count, 0);

  for (std::size_t pi = 0; pi < per_patch.size(); ++pi) {
    const Patch* patch = per_patch[pi].first;
    const PatchPrediction& pred = per_patch[pi].second;
    const auto describe = [&] {
      return "patch " + std::to_string(pi) + " at (" +
             std::to_string(patch->center.x) + ", " +
             std::to_string(patch->center.y) + ")";
    };
    if (pred.point_probs.size() != patch->size()) {
      throw std::invalid_argument(
          "merge_segmentation: " + describe() + " has " +
          std::to_string(pred.point_probs.size()) + " probability rows for " +
          std::to_string(patch->size()) + " points");
    }
    for (std::size_t k = 0; k < patch->point_indices.size(); ++k) {
      const std::size_t scene_idx = patch->point_indices[k];
      if (scene_idx >= scene_point_count) {
        throw std::invalid_argument("merge_segmentation: " + describe() +
                                    " indexes beyond the scene point count");
      }
      const std::vector<double>& row = pred.point_probs[k];
      if (row.size() != n_classes) {
        throw std::invalid_argument("merge_segmentation: " + describe() +
                                    " row width differs from n_classes");
      }
      std::vector<double>& acc = sums[scene_idx];
      for (std::size_t cls = 0; cls < n_classes; ++cls) {
        acc[cls] += row[cls];
      }
      ++cover[scene_idx];
    }
  }

  ScenePrediction out;
  out.point_probs.resize(scene_point_count);
  out.point_labels.assign(scene_point_count, kUnknownLabel);
  for (std::size_t i = 0; i < scene_point_count; ++i) {
    std::vector<double>& row = sums[i];
    if (cover[i] == 0) {
      out.point_probs[i] = std::vector<double>(n_classes, 0.0);
      continue;
    }
    const double inv = 1.0 / static_cast<double>(cover[i]);
    std::size_t best = 0;
    for (std::size_t cls = 0; cls < n_classes; ++cls) {
      row[cls] *= inv;
      if (row[cls] > row[best]) {
        best = cls;
      }
    }
    out.point_labels[i] = static_cast<int>(best);
    out.point_probs[i] = std::move(row);
  }
  return out;
}

}  // namespace azinorm
