#ifndef AZINORM_GEOM_HPP_
#define AZINORM_GEOM_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace azinorm {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// One LiDAR return. Coordinates are meters in a right-handed frame with +Z
/// up; intensity is carried along untouched by every transform.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

struct PointCloud {
  std::vector<Point> points;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// BEV-oriented 3D box. yaw is the heading of the length axis against +X of
/// the box's frame, kept in (-pi, pi].
struct OrientedBox {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
  double yaw = 0.0;
  double score = 0.0;
  int class_id = 0;
};

// Wraps a finite angle to (-pi, pi]. Throws std::invalid_argument on
// non-finite input.
double wrap_angle(double a);

// Polar angle of a BEV location against +X, wrapped to (-pi, pi]. The origin
// has no azimuth; it returns 0 by convention. Throws on non-finite input.
double azimuth_of(Vec2 c);

/// The per-patch rigid transform: translate the patch center to the origin,
/// then rotate by -theta about +Z so the outward radial direction lands on
/// +X. For patch transforms theta is always the azimuth of the center; sector
/// frames use rotation_only() with center (0,0) and an explicit angle.
struct NormTransform {
  Vec2 center{0.0, 0.0};
  double theta = 0.0;

  static NormTransform for_center(Vec2 c);
  static NormTransform rotation_only(double theta);
};

Point normalize_point(const NormTransform& t, const Point& p);
Point denormalize_point(const NormTransform& t, const Point& p);

// Box pose transforms with the same rigid motion as the points; yaw shifts by
// -theta (forward) / +theta (inverse) and is re-wrapped. Dimensions, score,
// class and cz stay untouched except for the (cx, cy) motion.
OrientedBox normalize_box(const NormTransform& t, const OrientedBox& b);
OrientedBox denormalize_box(const NormTransform& t, const OrientedBox& b);

// Rotation about the LiDAR origin by +angle. Used by the sector pipeline and
// by equivariance checks that spin whole scenes.
Point rotate_point_z(const Point& p, double angle);
Vec2 rotate_vec2_z(Vec2 v, double angle);
OrientedBox rotate_box_z(const OrientedBox& b, double angle);
PointCloud rotate_cloud_z(const PointCloud& pc, double angle);

// Normalizes every indexed point of `pc` in one pass (trig hoisted out of the
// loop). Order follows `indices`.
PointCloud normalize_cloud(const NormTransform& t, const PointCloud& pc,
                           const std::vector<std::size_t>& indices);

}  // namespace azinorm

#endif  // AZINORM_GEOM_HPP_
