#include "azinorm/geom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace azinorm {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double wrap_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double w = std::remainder(a, kTwoPi);  // (-pi, pi] up to the -pi edge
  if (w <= -kPi) {
    w = kPi;  // remainder can return exactly -pi; the range is open below
  }
  return w;
}

double azimuth_of(Vec2 c) {
  if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
    throw std::invalid_argument("azimuth_of: non-finite coordinates");
  }
  if (c.x == 0.0 && c.y == 0.0) {
    return 0.0;
  }
  return wrap_angle(std::atan2(c.y, c.x));
}

NormTransform NormTransform::for_center(Vec2 c) {
  return NormTransform{c, azimuth_of(c)};
}

NormTransform NormTransform::rotation_only(double theta) {
  return NormTransform{Vec2{0.0, 0.0}, wrap_angle(theta)};
}

Point normalize_point(const NormTransform& t, const Point& p) {
  const double c = std::cos(t.theta);
  const double s = std::sin(t.theta);
  const double dx = p.x - t.center.x;
  const double dy = p.y - t.center.y;
  return Point{c * dx + s * dy, -s * dx + c * dy, p.z, p.intensity};
}

Point denormalize_point(const NormTransform& t, const Point& p) {
  const double c = std::cos(t.theta);
  const double s = std::sin(t.theta);
  return Point{c * p.x - s * p.y + t.center.x, s * p.x + c * p.y + t.center.y,
               p.z, p.intensity};
}

OrientedBox normalize_box(const NormTransform& t, const OrientedBox& b) {
  const Point c = normalize_point(t, Point{b.cx, b.cy, b.cz, 0.0});
  OrientedBox out = b;
  out.cx = c.x;
  out.cy = c.y;
  out.yaw = wrap_angle(b.yaw - t.theta);
  return out;
}

OrientedBox denormalize_box(const NormTransform& t, const OrientedBox& b) {
  const Point c = denormalize_point(t, Point{b.cx, b.cy, b.cz, 0.0});
  OrientedBox out = b;
  out.cx = c.x;
  out.cy = c.y;
  out.yaw = wrap_angle(b.yaw + t.theta);
  return out;
}

Point rotate_point_z(const Point& p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Point{c * p.x - s * p.y, s * p.x + c * p.y, p.z, p.intensity};
}

Vec2 rotate_vec2_z(Vec2 v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Vec2{c * v.x - s * v.y, s * v.x + c * v.y};
}

OrientedBox rotate_box_z(const OrientedBox& b, double angle) {
  const Vec2 c = rotate_vec2_z(Vec2{b.cx, b.cy}, angle);
  OrientedBox out = b;
  out.cx = c.x;
  out.cy = c.y;
  out.yaw = wrap_angle(b.yaw + angle);
  return out;
}

PointCloud rotate_cloud_z(const PointCloud& pc, double angle) {
  PointCloud out;
  out.frame_id = pc.frame_id;
  out.points.reserve(pc.size());
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (const Point& p : pc.points) {
    out.points.push_back(Point{c * p.x - s * p.y, s * p.x + c * p.y, p.z,
                               p.intensity});
  }
  return out;
}

PointCloud normalize_cloud(const NormTransform& t, const PointCloud& pc,
                           const std::vector<std::size_t>& indices) {
  PointCloud out;
  out.frame_id = pc.frame_id;
  out.points.reserve(indices.size());
  const double c = std::cos(t.theta);
  const double s = std::sin(t.theta);
  for (std::size_t i : indices) {
    const Point& p = pc.points[i];
    const double dx = p.x - t.center.x;
    const double dy = p.y - t.center.y;
    out.points.push_back(Point{c * dx + s * dy, -s * dx + c * dy, p.z,
                               p.intensity});
  }
  return out;
}

}  // namespace azinorm
