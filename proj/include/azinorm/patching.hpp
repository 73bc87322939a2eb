#ifndef AZINORM_PATCHING_HPP_
#define AZINORM_PATCHING_HPP_

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "azinorm/geom.hpp"

namespace azinorm {

enum class PatchLayout { kCircle, kSquare };

struct Bounds2D {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;
};

struct PatchParams {
  PatchLayout layout = PatchLayout::kCircle;
  double radius = 9.6;  // circular layout
  double side = 17.6;   // square layout
  double stride = 6.4;
  Bounds2D bounds;
  std::size_t min_points = 5;  // negative filtering threshold
  std::optional<std::pair<double, double>> z_range;

  // Half-extent of the layout region in any BEV direction.
  double reach() const {
    return layout == PatchLayout::kCircle ? radius : side / 2.0;
  }
};

// Throws std::invalid_argument when a size/stride is not positive or the
// bounds rectangle is inverted.
void validate(const PatchParams& params);

// Closed-boundary membership of a BEV location in the layout region around
// `center`: distance <= r for circles, |dx| <= a/2 and |dy| <= a/2 for
// squares. A location exactly on the boundary belongs to every touching
// patch.
bool in_layout(const PatchParams& params, Vec2 center, double x, double y);

/// One patch: its lattice center, the normalization transform, the sorted
/// indices of contained scene points and their normalized copies, with
/// normalized_points[k] == normalize_point(transform, cloud[point_indices[k]]).
struct Patch {
  Vec2 center;
  NormTransform transform;
  std::vector<std::size_t> point_indices;
  PointCloud normalized_points;

  std::size_t size() const { return point_indices.size(); }
};

/// Uniform BEV hash grid over the scene. Every point lands in exactly one
/// cell by floor division of (x, y); the cells partition the index set.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(const PointCloud& pc, double cell_size);

  // Indices of all points in cells that intersect the closed rectangle
  // [lo.x, hi.x] x [lo.y, hi.y]. A superset of the exact answer.
  std::vector<std::size_t> candidates_in_rect(Vec2 lo, Vec2 hi) const;

  double cell_size() const { return cell_size_; }
  std::size_t point_count() const { return count_; }
  std::size_t cell_count() const { return cells_.size(); }

 private:
  double cell_size_ = 1.0;
  std::size_t count_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

SpatialIndex build_index(const PointCloud& pc, double cell_size);

// Patch-center lattice {(i*d, j*d)} clipped to the closed bounds, ordered by
// (y, x) ascending. Anchoring at the origin makes the lattice invariant under
// 90-degree rotations about the sensor.
std::vector<Vec2> enumerate_centers(const PatchParams& params);

// Gathers candidates from the index, applies the exact layout predicate and
// the optional closed z filter, sorts the surviving indices ascending and
// normalizes them into the patch frame.
Patch extract_patch(const PointCloud& pc, const SpatialIndex& index,
                    Vec2 center, const PatchParams& params);

// extract_patch at every enumerated center; patches with fewer than
// min_points points are dropped. Output follows the (y, x) center order
// regardless of `threads`.
std::vector<Patch> split_scene(const PointCloud& pc, const PatchParams& params,
                               unsigned threads = 1);

// Training-style selection: keeps every patch whose layout region contains at
// least one GT box center and a seeded uniform sample (without replacement)
// of round(neg_ratio * foreground_count) background patches. Output keeps the
// input patch order.
std::vector<Patch> sample_positive(const std::vector<Patch>& patches,
                                   const std::vector<OrientedBox>& gt_boxes,
                                   const PatchParams& params, double neg_ratio,
                                   std::uint64_t seed);

// Tight closed BEV bounds of a cloud; (0,0,0,0) for an empty cloud.
Bounds2D cloud_bounds_bev(const PointCloud& pc);

}  // namespace azinorm

#endif  // AZINORM_PATCHING_HPP_
