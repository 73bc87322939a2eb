#include "azinorm/sectorial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace azinorm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double positive_mod_two_pi(double a) {
  double m = std::fmod(a, kTwoPi);
  if (m < 0.0) {
    m += kTwoPi;
  }
  return m;
}

}  // namespace

double SectorParams::span() const {
  return kTwoPi / static_cast<double>(sector_count) + 2.0 * overlap;
}

double SectorParams::center_azimuth(std::size_t k) const {
  return wrap_angle((static_cast<double>(k) + 0.5) * kTwoPi /
                    static_cast<double>(sector_count));
}

void validate(const SectorParams& params) {
  if (params.sector_count < 1) {
    throw std::invalid_argument("sector params: K must be >= 1");
  }
  if (!(params.overlap >= 0.0) ||
      params.overlap >= std::numbers::pi / static_cast<double>(
                            params.sector_count)) {
    throw std::invalid_argument("sector params: overlap must be in "
                                "[0, pi/K)");
  }
}

bool sector_contains_azimuth(const SectorParams& params, std::size_t k,
                             double azimuth) {
  const double step = kTwoPi / static_cast<double>(params.sector_count);
  const double rel = positive_mod_two_pi(
      azimuth - (static_cast<double>(k) * step - params.overlap));
  return rel < params.span();
}

std::vector<Sector> split_sectors(const PointCloud& pc,
                                  const SectorParams& params) {
  validate(params);
  const std::size_t k_count = params.sector_count;
  const double step = kTwoPi / static_cast<double>(k_count);

  std::vector<Sector> sectors(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    sectors[k].index = k;
    sectors[k].start_azimuth =
        wrap_angle(static_cast<double>(k) * step - params.overlap);
    sectors[k].center_azimuth = params.center_azimuth(k);
  }

  for (std::size_t i = 0; i < pc.points.size(); ++i) {
    const Point& p = pc.points[i];
    if (p.x == 0.0 && p.y == 0.0) {
      sectors[0].point_indices.push_back(i);  // azimuth undefined
      continue;
    }
    const double azimuth = std::atan2(p.y, p.x);
    for (std::size_t k = 0; k < k_count; ++k) {
      if (sector_contains_azimuth(params, k, azimuth)) {
        sectors[k].point_indices.push_back(i);
      }
    }
  }

  for (Sector& sector : sectors) {
    const NormTransform rot =
        NormTransform::rotation_only(sector.center_azimuth);
    sector.normalized_points = normalize_cloud(rot, pc, sector.point_indices);
  }
  return sectors;
}

ScenePrediction merge_sector_detections(
    const std::vector<std::pair<double, PatchPrediction>>& per_sector,
    double iou_threshold, bool class_aware) {
  std::vector<std::pair<NormTransform, PatchPrediction>> as_transforms;
  as_transforms.reserve(per_sector.size());
  for (const auto& [theta, pred] : per_sector) {
    as_transforms.emplace_back(NormTransform::rotation_only(theta), pred);
  }
  return merge_detections(as_transforms, iou_threshold, class_aware);
}

}  // namespace azinorm
