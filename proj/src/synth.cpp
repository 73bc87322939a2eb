#include "azinorm/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "azinorm/merge.hpp"
#include "azinorm/parallel.hpp"
#include "azinorm/rng.hpp"

namespace azinorm {

namespace {

using nlohmann::json;

struct DimRange {
  double lo, hi;
};

struct ClassSpec {
  int class_id;
  DimRange length, width, height;
};

constexpr ClassSpec kCarLike{kCarClass, {3.5, 5.0}, {1.6, 2.1}, {1.4, 1.9}};
constexpr ClassSpec kPedestrianLike{
    kPedestrianClass, {0.4, 0.8}, {0.4, 0.8}, {1.5, 1.9}};

// One surface sample in the box's local frame; faces weighted by area.
Point sample_box_surface(Rng& rng, const OrientedBox& b) {
  const double hl = b.length / 2.0;
  const double hw = b.width / 2.0;
  const double hh = b.height / 2.0;
  const double area_x = b.width * b.height;   // faces at x = +-hl
  const double area_y = b.length * b.height;  // faces at y = +-hw
  const double area_z = b.length * b.width;   // faces at z = +-hh
  const double total = 2.0 * (area_x + area_y + area_z);
  const double u = rng.uniform(0.0, total);
  const double a = rng.uniform01();
  const double c = rng.uniform01();
  double lx, ly, lz;
  if (u < 2.0 * area_x) {
    lx = u < area_x ? hl : -hl;
    ly = (a - 0.5) * b.width;
    lz = (c - 0.5) * b.height;
  } else if (u < 2.0 * (area_x + area_y)) {
    ly = u < 2.0 * area_x + area_y ? hw : -hw;
    lx = (a - 0.5) * b.length;
    lz = (c - 0.5) * b.height;
  } else {
    lz = u < total - area_z ? hh : -hh;
    lx = (a - 0.5) * b.length;
    ly = (c - 0.5) * b.width;
  }
  const double cy = std::cos(b.yaw);
  const double sy = std::sin(b.yaw);
  return Point{b.cx + cy * lx - sy * ly, b.cy + sy * lx + cy * ly, b.cz + lz,
               0.0};
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  std::size_t e = s.find_last_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return "";
  }
  return s.substr(b, e - b + 1);
}

}  // namespace

void validate(const SceneSpec& spec) {
  if (spec.bounds.min_x >= spec.bounds.max_x ||
      spec.bounds.min_y >= spec.bounds.max_y) {
    throw std::invalid_argument("scene spec: degenerate bounds");
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw std::invalid_argument("scene spec: noise_sigma must be >= 0");
  }
}

LabeledScene gen_scene(const SceneSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  LabeledScene scene;
  scene.cloud.frame_id = "synth-" + std::to_string(spec.seed);

  // Object placement: pairwise-disjoint BEV footprints, fully in bounds.
  constexpr int kMaxAttempts = 10000;
  for (std::size_t i = 0; i < spec.n_objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      const ClassSpec& cls =
          rng.below(2) == 0 ? kCarLike : kPedestrianLike;
      OrientedBox box;
      box.class_id = cls.class_id;
      box.length = rng.uniform(cls.length.lo, cls.length.hi);
      box.width = rng.uniform(cls.width.lo, cls.width.hi);
      box.height = rng.uniform(cls.height.lo, cls.height.hi);
      box.yaw = wrap_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
      box.cz = box.height / 2.0;
      box.score = 1.0;
      const double inset = std::hypot(box.length, box.width) / 2.0;
      const double x_lo = spec.bounds.min_x + inset;
      const double x_hi = spec.bounds.max_x - inset;
      const double y_lo = spec.bounds.min_y + inset;
      const double y_hi = spec.bounds.max_y - inset;
      box.cx = rng.uniform(std::min(x_lo, x_hi), std::max(x_lo, x_hi));
      box.cy = rng.uniform(std::min(y_lo, y_hi), std::max(y_lo, y_hi));
      if (x_lo > x_hi || y_lo > y_hi) {
        continue;  // bounds too small for this draw
      }
      bool overlaps = false;
      for (const OrientedBox& other : scene.gt_boxes) {
        if (rotated_iou_bev(box, other) > 0.0) {
          overlaps = true;
          break;
        }
      }
      if (!overlaps) {
        scene.gt_boxes.push_back(box);
        placed = true;
      }
    }
    if (!placed) {
      throw std::runtime_error(
          "gen_scene: no non-overlapping placement for object " +
          std::to_string(i) + " after 10000 attempts");
    }
  }

  std::vector<int> labels;
  labels.reserve(spec.ground_points +
                 spec.n_objects * spec.points_per_object_surface);

  for (std::size_t i = 0; i < spec.ground_points; ++i) {
    Point p;
    p.x = rng.uniform(spec.bounds.min_x, spec.bounds.max_x);
    p.y = rng.uniform(spec.bounds.min_y, spec.bounds.max_y);
    p.z = rng.normal(0.0, spec.noise_sigma);
    p.intensity = rng.uniform01();
    scene.cloud.points.push_back(p);
    labels.push_back(kGroundClass);
  }

  for (const OrientedBox& box : scene.gt_boxes) {
    for (std::size_t j = 0; j < spec.points_per_object_surface; ++j) {
      Point p = sample_box_surface(rng, box);
      p.x += rng.normal(0.0, spec.noise_sigma);
      p.y += rng.normal(0.0, spec.noise_sigma);
      p.z += rng.normal(0.0, spec.noise_sigma);
      p.intensity = rng.uniform01();
      scene.cloud.points.push_back(p);
      labels.push_back(box.class_id);
    }
  }

  scene.point_labels = std::move(labels);
  return scene;
}

SceneSpec parse_scene_spec(const std::string& text) {
  SceneSpec spec;
  const std::string body = trim(text);
  const auto apply = [&spec](const std::string& key, double value) {
    if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(value);
    } else if (key == "n_objects") {
      spec.n_objects = static_cast<std::size_t>(value);
    } else if (key == "ground_points") {
      spec.ground_points = static_cast<std::size_t>(value);
    } else if (key == "points_per_object") {
      spec.points_per_object_surface = static_cast<std::size_t>(value);
    } else if (key == "noise_sigma") {
      spec.noise_sigma = value;
    } else if (key == "min_x") {
      spec.bounds.min_x = value;
    } else if (key == "min_y") {
      spec.bounds.min_y = value;
    } else if (key == "max_x") {
      spec.bounds.max_x = value;
    } else if (key == "max_y") {
      spec.bounds.max_y = value;
    } else {
      throw io_error("scene spec: unknown key '" + key + "'");
    }
  };

  if (!body.empty() && body[0] == '{') {
    json doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      throw io_error("scene spec: not a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
      if (!value.is_number()) {
        throw io_error("scene spec: key '" + key + "' must be a number");
      }
      apply(key, value.get<double>());
    }
  } else {
    std::istringstream stream(body);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      const std::string entry = trim(line);
      if (entry.empty() || entry[0] == '#') {
        continue;
      }
      const std::size_t eq = entry.find('=');
      if (eq == std::string::npos) {
        throw io_error("scene spec: expected key=value at line " +
                       std::to_string(line_no));
      }
      const std::string key = trim(entry.substr(0, eq));
      const std::string value = trim(entry.substr(eq + 1));
      try {
        std::size_t consumed = 0;
        const double v = std::stod(value, &consumed);
        if (consumed != value.size()) {
          throw std::invalid_argument(value);
        }
        apply(key, v);
      } catch (const io_error&) {
        throw;
      } catch (const std::exception&) {
        throw io_error("scene spec: malformed value at line " +
                       std::to_string(line_no));
      }
    }
  }
  validate(spec);
  return spec;
}

std::string metric_report_to_json(const MetricReport& report) {
  json doc = json::object();
  json recall = json::object();
  json precision = json::object();
  for (const auto& [thr, v] : report.recall_at_iou) {
    recall[json(thr).dump()] = v;
  }
  for (const auto& [thr, v] : report.precision_at_iou) {
    precision[json(thr).dump()] = v;
  }
  doc["recall_at_iou"] = std::move(recall);
  doc["precision_at_iou"] = std::move(precision);
  doc["coverage_fraction"] = report.coverage_fraction;
  doc["duplication_mean"] = report.duplication_mean;
  doc["patches_processed"] = report.patches_processed;
  doc["wall_time_sec"] = report.wall_time_sec;
  doc["patches_per_sec"] = report.patches_per_sec;
  doc["points_per_sec"] = report.points_per_sec;
  return doc.dump();
}

MetricReport metric_report_from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw io_error("metric report: not a JSON object");
  }
  MetricReport report;
  const auto read_map = [&doc](const char* key,
                               std::map<double, double>& out) {
    auto it = doc.find(key);
    if (it == doc.end()) {
      return;
    }
    for (const auto& [k, v] : it->items()) {
      out[json::parse(k).get<double>()] = v.get<double>();
    }
  };
  read_map("recall_at_iou", report.recall_at_iou);
  read_map("precision_at_iou", report.precision_at_iou);
  report.coverage_fraction = doc.value("coverage_fraction", 0.0);
  report.duplication_mean = doc.value("duplication_mean", 0.0);
  report.patches_processed = doc.value("patches_processed", std::size_t{0});
  report.wall_time_sec = doc.value("wall_time_sec", 0.0);
  report.patches_per_sec = doc.value("patches_per_sec", 0.0);
  report.points_per_sec = doc.value("points_per_sec", 0.0);
  return report;
}

void recall_precision(const std::vector<OrientedBox>& pred,
                      const std::vector<OrientedBox>& gt,
                      const std::vector<double>& thresholds,
                      MetricReport& report) {
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&pred](std::size_t i, std::size_t j) {
                     if (pred[i].score != pred[j].score) {
                       return pred[i].score > pred[j].score;
                     }
                     if (pred[i].cx != pred[j].cx) return pred[i].cx < pred[j].cx;
                     if (pred[i].cy != pred[j].cy) return pred[i].cy < pred[j].cy;
                     return pred[i].yaw < pred[j].yaw;
                   });

  for (double threshold : thresholds) {
    std::vector<bool> gt_taken(gt.size(), false);
    std::size_t matched = 0;
    for (std::size_t oi : order) {
      double best_iou = 0.0;
      std::size_t best_gt = gt.size();
      for (std::size_t g = 0; g < gt.size(); ++g) {
        if (gt_taken[g]) {
          continue;
        }
        const double iou = rotated_iou_bev(pred[oi], gt[g]);
        if (iou > best_iou) {
          best_iou = iou;
          best_gt = g;
        }
      }
      if (best_gt < gt.size() && best_iou > threshold) {
        gt_taken[best_gt] = true;
        ++matched;
      }
    }
    const double recall =
        gt.empty() ? 1.0
                   : static_cast<double>(matched) / static_cast<double>(gt.size());
    const double precision =
        pred.empty() ? 1.0
                     : static_cast<double>(matched) /
                           static_cast<double>(pred.size());
    report.recall_at_iou[threshold] = recall;
    report.precision_at_iou[threshold] = precision;
  }
}

MetricReport bench_throughput(const PointCloud& pc, const PatchParams& params,
                              const Perceiver& perceiver,
                              std::size_t repetitions, double nms_iou,
                              unsigned threads) {
  if (repetitions < 1) {
    throw std::invalid_argument("bench_throughput: repetitions must be >= 1");
  }
  MetricReport report;
  std::vector<double> times;
  times.reserve(repetitions);
  std::size_t patches_processed = 0;
  std::size_t total_patch_points = 0;
  std::size_t covered = 0;

  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Patch> patches = split_scene(pc, params, threads);
    std::vector<std::pair<NormTransform, PatchPrediction>> per_patch(
        patches.size());
    parallel_for(patches.size(), threads, [&](std::size_t i) {
      per_patch[i] = {patches[i].transform, perceiver.perceive(patches[i])};
    });
    ScenePrediction merged = merge_detections(per_patch, nms_iou);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());

    if (rep == 0) {
      patches_processed = patches.size();
      std::vector<bool> seen(pc.size(), false);
      for (const Patch& patch : patches) {
        total_patch_points += patch.size();
        for (std::size_t idx : patch.point_indices) {
          seen[idx] = true;
        }
      }
      covered = static_cast<std::size_t>(
          std::count(seen.begin(), seen.end(), true));
    }
    (void)merged;
  }

  std::sort(times.begin(), times.end());
  const double median = times[times.size() / 2];
  report.wall_time_sec = median;
  report.patches_processed = patches_processed;
  if (!pc.empty()) {
    report.duplication_mean = static_cast<double>(total_patch_points) /
                              static_cast<double>(pc.size());
    report.coverage_fraction =
        static_cast<double>(covered) / static_cast<double>(pc.size());
  }
  if (median > 0.0) {
    report.patches_per_sec = static_cast<double>(patches_processed) / median;
    report.points_per_sec = static_cast<double>(pc.size()) / median;
  }
  return report;
}

}  // namespace azinorm
