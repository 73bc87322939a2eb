#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "azinorm/rng.hpp"
#include "azinorm/sectorial.hpp"
#include "oracles.hpp"

using namespace azinorm;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

Point at_azimuth(double azimuth_deg, double range = 10.0, double z = 0.3) {
  return Point{range * std::cos(azimuth_deg * kDeg),
               range * std::sin(azimuth_deg * kDeg), z, 0.5};
}

}  // namespace

TEST_CASE("sector params validation") {
  SectorParams ok;
  ok.sector_count = 4;
  ok.overlap = 5.0 * kDeg;
  CHECK_NOTHROW(validate(ok));

  SectorParams degenerate;
  degenerate.sector_count = 1;
  degenerate.overlap = 0.0;
  CHECK_NOTHROW(validate(degenerate));

  SectorParams zero;
  zero.sector_count = 0;
  CHECK_THROWS_AS(validate(zero), std::invalid_argument);

  SectorParams wide;
  wide.sector_count = 4;
  wide.overlap = kPi / 4;
  CHECK_THROWS_AS(validate(wide), std::invalid_argument);
}

TEST_CASE("split_sectors without overlap assigns each point once") {
  SectorParams params;
  params.sector_count = 4;
  params.overlap = 0.0;
  PointCloud pc;
  pc.points.push_back(at_azimuth(10.0));
  const auto sectors = split_sectors(pc, params);
  REQUIRE(sectors.size() == 4);
  CHECK(sectors[0].point_indices == std::vector<std::size_t>{0});
  CHECK(sectors[1].point_indices.empty());
  CHECK(sectors[2].point_indices.empty());
  CHECK(sectors[3].point_indices.empty());
  // theta_0 = 45 deg, so the normalized azimuth is 10 - 45 = -35 deg.
  const Point& n = sectors[0].normalized_points.points[0];
  CHECK(std::atan2(n.y, n.x) == doctest::Approx(-35.0 * kDeg).epsilon(1e-12));
  CHECK(n.z == 0.3);
}

TEST_CASE("split_sectors overlap bands land in two sectors") {
  SectorParams params;
  params.sector_count = 4;
  params.overlap = 5.0 * kDeg;
  PointCloud pc;
  pc.points.push_back(at_azimuth(89.0));   // in sectors 0 and 1
  pc.points.push_back(at_azimuth(45.0));   // sector 0 only
  pc.points.push_back(at_azimuth(-2.0));   // wraps: sectors 3 and 0
  const auto sectors = split_sectors(pc, params);
  CHECK(sectors[0].point_indices == std::vector<std::size_t>{0, 1, 2});
  CHECK(sectors[1].point_indices == std::vector<std::size_t>{0});
  CHECK(sectors[2].point_indices.empty());
  CHECK(sectors[3].point_indices == std::vector<std::size_t>{2});
}

TEST_CASE("origin points go to sector 0") {
  SectorParams params;
  params.sector_count = 8;
  PointCloud pc;
  pc.points.push_back(Point{0.0, 0.0, 1.0, 0.0});
  const auto sectors = split_sectors(pc, params);
  CHECK(sectors[0].point_indices == std::vector<std::size_t>{0});
  for (std::size_t k = 1; k < 8; ++k) {
    CHECK(sectors[k].point_indices.empty());
  }
}

TEST_CASE("rotation-only: ranges and z are preserved exactly") {
  Rng rng(64);
  SectorParams params;
  params.sector_count = 8;
  params.overlap = 5.0 * kDeg;
  PointCloud pc;
  for (int i = 0; i < 2000; ++i) {
    pc.points.push_back(Point{rng.uniform(-70.0, 70.0),
                              rng.uniform(-70.0, 70.0),
                              rng.uniform(-3.0, 3.0), rng.uniform01()});
  }
  const auto sectors = split_sectors(pc, params);
  for (const Sector& sector : sectors) {
    for (std::size_t k = 0; k < sector.point_indices.size(); ++k) {
      const Point& orig = pc.points[sector.point_indices[k]];
      const Point& norm = sector.normalized_points.points[k];
      CHECK(std::abs(std::hypot(norm.x, norm.y) -
                     std::hypot(orig.x, orig.y)) <= 1e-9);
      CHECK(norm.z == orig.z);
      CHECK(norm.intensity == orig.intensity);
    }
  }
}

TEST_CASE("normalized azimuths stay inside +-(pi/K + overlap)") {
  Rng rng(65);
  for (std::size_t k_count : {std::size_t{4}, std::size_t{8}}) {
    SectorParams params;
    params.sector_count = k_count;
    params.overlap = 5.0 * kDeg;
    PointCloud pc;
    for (int i = 0; i < 5000; ++i) {
      pc.points.push_back(Point{rng.uniform(-50.0, 50.0),
                                rng.uniform(-50.0, 50.0), 0.0, 0.0});
    }
    const double limit = kPi / static_cast<double>(k_count) + params.overlap;
    std::size_t assigned = 0;
    for (const Sector& sector : split_sectors(pc, params)) {
      assigned += sector.size();
      for (const Point& p : sector.normalized_points.points) {
        if (p.x == 0.0 && p.y == 0.0) {
          continue;
        }
        CHECK(std::abs(std::atan2(p.y, p.x)) <= limit);
      }
    }
    CHECK(assigned >= pc.size());  // overlap duplicates points
  }
}

TEST_CASE("every point is assigned to at least one sector") {
  Rng rng(66);
  SectorParams params;
  params.sector_count = 6;
  params.overlap = 2.0 * kDeg;
  PointCloud pc;
  for (int i = 0; i < 3000; ++i) {
    pc.points.push_back(Point{rng.uniform(-50.0, 50.0),
                              rng.uniform(-50.0, 50.0), 0.0, 0.0});
  }
  std::vector<bool> covered(pc.size(), false);
  for (const Sector& sector : split_sectors(pc, params)) {
    for (std::size_t idx : sector.point_indices) {
      covered[idx] = true;
    }
  }
  CHECK(std::count(covered.begin(), covered.end(), false) == 0);
}

TEST_CASE("merge_sector_detections rotates boxes back") {
  OrientedBox b;
  b.cx = 10.0;
  b.cy = 0.0;
  b.length = 4.0;
  b.width = 2.0;
  b.height = 1.5;
  b.yaw = 0.2;
  b.score = 0.9;
  PatchPrediction pred;
  pred.boxes.push_back(b);
  const double theta = kPi / 4;
  const auto merged = merge_sector_detections({{theta, pred}}, 0.1);
  REQUIRE(merged.boxes.size() == 1);
  const OrientedBox expect = rotate_box_z(b, theta);
  CHECK(merged.boxes[0].cx == doctest::Approx(expect.cx).epsilon(1e-12));
  CHECK(merged.boxes[0].cy == doctest::Approx(expect.cy).epsilon(1e-12));
  CHECK(merged.boxes[0].yaw == doctest::Approx(expect.yaw).epsilon(1e-12));
}

TEST_CASE("duplicate detections in an overlap band merge to one box") {
  // The same LiDAR-frame box seen from sectors 0 and 1.
  SectorParams params;
  params.sector_count = 4;
  params.overlap = 5.0 * kDeg;
  OrientedBox lidar;
  lidar.cx = 10.0 * std::cos(89.0 * kDeg);
  lidar.cy = 10.0 * std::sin(89.0 * kDeg);
  lidar.length = 4.0;
  lidar.width = 2.0;
  lidar.height = 1.5;
  lidar.yaw = 0.4;
  lidar.score = 0.9;
  std::vector<std::pair<double, PatchPrediction>> per_sector;
  for (std::size_t k : {std::size_t{0}, std::size_t{1}}) {
    const double theta = params.center_azimuth(k);
    PatchPrediction pred;
    pred.boxes.push_back(
        normalize_box(NormTransform::rotation_only(theta), lidar));
    per_sector.push_back({theta, pred});
  }
  const auto merged = merge_sector_detections(per_sector, 0.1);
  REQUIRE(merged.boxes.size() == 1);
  CHECK(merged.boxes[0].cx == doctest::Approx(lidar.cx).epsilon(1e-9));
  CHECK(merged.boxes[0].cy == doctest::Approx(lidar.cy).epsilon(1e-9));
}

TEST_CASE("K=1 with no overlap is a pure half-turn pipeline") {
  SectorParams params;
  params.sector_count = 1;
  params.overlap = 0.0;
  CHECK(params.center_azimuth(0) == kPi);
  PointCloud pc;
  pc.points.push_back(Point{3.0, 4.0, 1.0, 0.0});
  pc.points.push_back(Point{-2.0, 7.0, -1.0, 0.0});
  const auto sectors = split_sectors(pc, params);
  REQUIRE(sectors.size() == 1);
  REQUIRE(sectors[0].size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const Point& orig = pc.points[k];
    const Point& norm = sectors[0].normalized_points.points[k];
    CHECK(norm.x == doctest::Approx(-orig.x).epsilon(1e-12));
    CHECK(norm.y == doctest::Approx(-orig.y).epsilon(1e-12));
  }
}
