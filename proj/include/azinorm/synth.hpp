#ifndef AZINORM_SYNTH_HPP_
#define AZINORM_SYNTH_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "azinorm/patching.hpp"
#include "azinorm/perceive.hpp"
#include "azinorm/scene_io.hpp"

namespace azinorm {

inline constexpr int kGroundClass = 0;
inline constexpr int kCarClass = 1;
inline constexpr int kPedestrianClass = 2;
inline constexpr std::size_t kSynthClassCount = 3;

/// Seeded scene recipe. Objects draw a class uniformly: car-like boxes with
/// l in [3.5,5.0], w in [1.6,2.1], h in [1.4,1.9] m, or pedestrian-like with
/// l,w in [0.4,0.8], h in [1.5,1.9] m. Placements are rejection-sampled until
/// the BEV footprints are pairwise disjoint and fully inside bounds.
struct SceneSpec {
  std::uint64_t seed = 1;
  std::size_t n_objects = 8;
  Bounds2D bounds{-40.0, -40.0, 40.0, 40.0};
  std::size_t ground_points = 4000;
  std::size_t points_per_object_surface = 120;
  double noise_sigma = 0.03;
};

void validate(const SceneSpec& spec);

// Deterministic in spec: ground points first (uniform BEV, z ~ N(0, sigma),
// class 0), then each object's surface samples (faces weighted by area, plus
// isotropic Gaussian noise), in placement order. Throws std::runtime_error
// when an object cannot be placed within 10^4 attempts.
LabeledScene gen_scene(const SceneSpec& spec);

// JSON (leading '{') or "key = value" lines; keys: seed, n_objects,
// ground_points, points_per_object, noise_sigma, min_x, min_y, max_x, max_y.
SceneSpec parse_scene_spec(const std::string& text);

struct MetricReport {
  std::map<double, double> recall_at_iou;
  std::map<double, double> precision_at_iou;
  double coverage_fraction = 0.0;
  double duplication_mean = 0.0;
  std::size_t patches_processed = 0;
  double wall_time_sec = 0.0;
  double patches_per_sec = 0.0;
  double points_per_sec = 0.0;
};

std::string metric_report_to_json(const MetricReport& report);
MetricReport metric_report_from_json(const std::string& text);

// Greedy score-ordered one-to-one matching: each prediction takes the
// unmatched GT with the highest BEV IoU when that IoU exceeds the threshold.
// Empty GT gives recall 1, empty predictions give precision 1.
void recall_precision(const std::vector<OrientedBox>& pred,
                      const std::vector<OrientedBox>& gt,
                      const std::vector<double>& thresholds,
                      MetricReport& report);

// End-to-end detect pipeline timing: split, perceive, merge, repeated
// `repetitions` times; wall_time and the rates are medians. Also fills
// duplication_mean (total patch points / scene points) and
// coverage_fraction.
MetricReport bench_throughput(const PointCloud& pc, const PatchParams& params,
                              const Perceiver& perceiver,
                              std::size_t repetitions, double nms_iou = 0.1,
                              unsigned threads = 1);

}  // namespace azinorm

#endif  // AZINORM_SYNTH_HPP_
