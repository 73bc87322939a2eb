#ifndef AZINORM_SECTORIAL_HPP_
#define AZINORM_SECTORIAL_HPP_

#include <cstddef>
#include <utility>
#include <vector>

#include "azinorm/geom.hpp"
#include "azinorm/merge.hpp"
#include "azinorm/perceive.hpp"

namespace azinorm {

/// Coarse normalization variant: K angular sectors anchored at azimuth 0,
/// each widened by `overlap` on both sides, each rotated by minus its center
/// azimuth. No translation, so |p| is preserved exactly.
struct SectorParams {
  std::size_t sector_count = 4;  // K
  double overlap = 5.0 * 0.017453292519943295;  // half-overlap per side, rad

  double span() const;            // 2*pi/K + 2*overlap
  double center_azimuth(std::size_t k) const;  // (k + 0.5) * 2*pi/K, wrapped
};

// K >= 1 (K = 1 degenerates to rotating the whole scene by pi) and
// 0 <= overlap < pi/K.
void validate(const SectorParams& params);

struct Sector {
  std::size_t index = 0;
  double start_azimuth = 0.0;   // k*2*pi/K - overlap, wrapped
  double center_azimuth = 0.0;  // theta_k
  std::vector<std::size_t> point_indices;
  PointCloud normalized_points;

  std::size_t size() const { return point_indices.size(); }
};

// Wrapped-interval membership of an azimuth in sector k:
// [k*2*pi/K - overlap, (k+1)*2*pi/K + overlap).
bool sector_contains_azimuth(const SectorParams& params, std::size_t k,
                             double azimuth);

// Assigns every point to each sector whose wrapped interval
// [start, start + span) contains its azimuth; overlap bands land in two
// sectors, the origin lands in sector 0. Each sector's points are rotated by
// -theta_k about +Z. All K sectors are returned, in index order, even when
// empty.
std::vector<Sector> split_sectors(const PointCloud& pc,
                                  const SectorParams& params);

// Rotates every sector-frame box back by +theta_k, concatenates, runs NMS.
ScenePrediction merge_sector_detections(
    const std::vector<std::pair<double, PatchPrediction>>& per_sector,
    double iou_threshold, bool class_aware = true);

}  // namespace azinorm

#endif  // AZINORM_SECTORIAL_HPP_
