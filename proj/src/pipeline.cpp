#include "azinorm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <memory>
#include <stdexcept>

#include "azinorm/parallel.hpp"
#include "azinorm/svg.hpp"

namespace azinorm {

namespace {

bool is_json_path(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
}

std::string cloud_input(const PipelineConfig& cfg) {
  for (const std::string& path : cfg.inputs) {
    if (!is_json_path(path)) {
      return path;
    }
  }
  throw std::invalid_argument("no point cloud input given");
}

std::optional<std::string> labels_input(const PipelineConfig& cfg) {
  for (const std::string& path : cfg.inputs) {
    if (is_json_path(path)) {
      return path;
    }
  }
  return std::nullopt;
}

// Sector wrapped as a patch so perceivers and the segmentation merge can
// treat both split modes uniformly. The transform is rotation-only.
Patch sector_as_patch(Sector&& sector) {
  Patch patch;
  patch.center = Vec2{0.0, 0.0};
  patch.transform = NormTransform::rotation_only(sector.center_azimuth);
  patch.point_indices = std::move(sector.point_indices);
  patch.normalized_points = std::move(sector.normalized_points);
  return patch;
}

// Oracle for sector mode: a GT box belongs to every sector whose interval
// contains the azimuth of its center, mirroring point membership.
PatchPrediction sector_oracle(const SectorParams& params, std::size_t k,
                              const NormTransform& transform,
                              const std::vector<OrientedBox>& scene_gt) {
  PatchPrediction out;
  for (const OrientedBox& b : scene_gt) {
    if (b.cx == 0.0 && b.cy == 0.0) {
      if (k == 0) {
        OrientedBox kept = normalize_box(transform, b);
        kept.score = 1.0;
        out.boxes.push_back(kept);
      }
      continue;
    }
    if (sector_contains_azimuth(params, k, std::atan2(b.cy, b.cx))) {
      OrientedBox kept = normalize_box(transform, b);
      kept.score = 1.0;
      out.boxes.push_back(kept);
    }
  }
  return out;
}

struct SplitOutcome {
  std::vector<Patch> patches;
  std::vector<double> sector_azimuths;  // parallel to patches in sector mode
};

SplitOutcome split_for(const PointCloud& pc, const LabeledScene* gt,
                       const PipelineConfig& cfg, const PatchParams& params) {
  SplitOutcome out;
  if (cfg.mode == SplitMode::kPatches) {
    out.patches = split_scene(pc, params, cfg.threads);
    if (cfg.neg_ratio) {
      if (gt == nullptr) {
        throw std::invalid_argument("positive sampling needs GT labels");
      }
      out.patches = sample_positive(out.patches, gt->gt_boxes, params,
                                    *cfg.neg_ratio, cfg.seed.value_or(0));
    }
  } else {
    std::vector<Sector> sectors = split_sectors(pc, sector_params_for(cfg));
    out.patches.reserve(sectors.size());
    out.sector_azimuths.reserve(sectors.size());
    for (Sector& sector : sectors) {
      out.sector_azimuths.push_back(sector.center_azimuth);
      out.patches.push_back(sector_as_patch(std::move(sector)));
    }
  }
  return out;
}

void fill_split_stats(const SplitOutcome& split, std::size_t scene_points,
                      MetricReport& report) {
  report.patches_processed = split.patches.size();
  if (scene_points == 0) {
    return;
  }
  std::vector<bool> seen(scene_points, false);
  std::size_t total_patch_points = 0;
  for (const Patch& patch : split.patches) {
    total_patch_points += patch.size();
    for (std::size_t idx : patch.point_indices) {
      seen[idx] = true;
    }
  }
  report.duplication_mean = static_cast<double>(total_patch_points) /
                            static_cast<double>(scene_points);
  report.coverage_fraction =
      static_cast<double>(std::count(seen.begin(), seen.end(), true)) /
      static_cast<double>(scene_points);
}

int fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  if (cfg.mode == SplitMode::kPatches) {
    PatchParams params;
    params.layout = cfg.layout;
    params.radius = cfg.radius;
    params.side = cfg.side;
    params.stride = cfg.stride;
    params.min_points = cfg.min_points;
    params.z_range = cfg.z_range;
    validate(params);
  } else {
    validate(sector_params_for(cfg));
  }
  if (!(cfg.nms_iou >= 0.0 && cfg.nms_iou <= 1.0)) {
    throw std::invalid_argument("nms iou threshold must be in [0, 1]");
  }
  if (cfg.neg_ratio && !(*cfg.neg_ratio >= 0.0)) {
    throw std::invalid_argument("neg ratio must be >= 0");
  }
  if (cfg.knn_k < 1) {
    throw std::invalid_argument("knn k must be >= 1");
  }
  if (cfg.bench_repetitions < 1) {
    throw std::invalid_argument("bench repetitions must be >= 1");
  }
}

PatchParams patch_params_for(const PipelineConfig& cfg, const PointCloud& pc) {
  PatchParams params;
  params.layout = cfg.layout;
  params.radius = cfg.radius;
  params.side = cfg.side;
  params.stride = cfg.stride;
  params.min_points = cfg.min_points;
  params.z_range = cfg.z_range;
  params.bounds = cloud_bounds_bev(pc);
  return params;
}

SectorParams sector_params_for(const PipelineConfig& cfg) {
  SectorParams params;
  params.sector_count = cfg.sectors;
  params.overlap = cfg.overlap_rad;
  return params;
}

PipelineResult detect_scene(const PointCloud& pc, const LabeledScene* gt,
                            const PipelineConfig& cfg) {
  validate(cfg);
  if (cfg.perceiver == PerceiverKind::kKnn) {
    throw std::invalid_argument("the knn perceiver segments, it cannot detect");
  }
  if (cfg.perceiver == PerceiverKind::kOracle && gt == nullptr) {
    throw std::invalid_argument("the oracle perceiver needs GT labels");
  }

  const auto t0 = std::chrono::steady_clock::now();
  const PatchParams params = patch_params_for(cfg, pc);
  SplitOutcome split = split_for(pc, gt, cfg, params);

  const SectorParams sector_params = sector_params_for(cfg);
  std::unique_ptr<Perceiver> perceiver;
  if (cfg.perceiver == PerceiverKind::kCluster) {
    perceiver = std::make_unique<ClusterPerceiver>(cfg.cluster);
  } else if (cfg.mode == SplitMode::kPatches) {
    perceiver = std::make_unique<OraclePerceiver>(gt->gt_boxes, params);
  }

  std::vector<std::pair<NormTransform, PatchPrediction>> per_patch(
      split.patches.size());
  parallel_for(split.patches.size(), cfg.threads, [&](std::size_t i) {
    const Patch& patch = split.patches[i];
    PatchPrediction pred;
    if (perceiver) {
      pred = perceiver->perceive(patch);
    } else {
      pred = sector_oracle(sector_params, i, patch.transform, gt->gt_boxes);
    }
    per_patch[i] = {patch.transform, std::move(pred)};
  });

  PipelineResult result;
  result.prediction = merge_detections(per_patch, cfg.nms_iou);
  const auto t1 = std::chrono::steady_clock::now();

  fill_split_stats(split, pc.size(), result.report);
  result.report.wall_time_sec =
      std::chrono::duration<double>(t1 - t0).count();
  if (result.report.wall_time_sec > 0.0) {
    result.report.patches_per_sec =
        static_cast<double>(result.report.patches_processed) /
        result.report.wall_time_sec;
    result.report.points_per_sec =
        static_cast<double>(pc.size()) / result.report.wall_time_sec;
  }
  if (gt != nullptr) {
    recall_precision(result.prediction.boxes, gt->gt_boxes, {0.3, 0.5, 0.7},
                     result.report);
    result.has_metrics = true;
  }
  return result;
}

PipelineResult segment_scene(const PointCloud& pc,
                             const std::vector<int>& point_labels,
                             std::size_t n_classes,
                             const PipelineConfig& cfg) {
  validate(cfg);
  if (point_labels.size() != pc.size()) {
    throw std::invalid_argument("segmentation needs one GT label per point");
  }

  const PatchParams params = patch_params_for(cfg, pc);
  SplitOutcome split = split_for(pc, nullptr, cfg, params);
  const KnnSelfSegmenter segmenter(point_labels, cfg.knn_k, n_classes);

  std::vector<std::pair<const Patch*, PatchPrediction>> per_patch(
      split.patches.size());
  parallel_for(split.patches.size(), cfg.threads, [&](std::size_t i) {
    per_patch[i] = {&split.patches[i], segmenter.perceive(split.patches[i])};
  });

  PipelineResult result;
  result.prediction = merge_segmentation(per_patch, pc.size(), n_classes);
  fill_split_stats(split, pc.size(), result.report);
  return result;
}

int cmd_detect(const PipelineConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.output.empty()) {
      return fail("detect: no output path");
    }
    const std::string cloud_path = cloud_input(cfg);
    const PointCloud pc = load_cloud(cloud_path);

    std::optional<LabeledScene> gt;
    if (auto labels_path = labels_input(cfg)) {
      SceneLabels labels = read_labels(read_file(*labels_path));
      gt.emplace();
      gt->gt_boxes = std::move(labels.gt_boxes);
      gt->point_labels = std::move(labels.point_labels);
    }

    const PipelineResult result =
        detect_scene(pc, gt ? &*gt : nullptr, cfg);

    Predictions preds;
    preds.frame = pc.frame_id;
    preds.boxes = result.prediction.boxes;
    write_file(cfg.output, write_predictions(preds));

    std::cerr << "detect: " << pc.size() << " points, "
              << result.report.patches_processed << " patches, "
              << preds.boxes.size() << " boxes -> " << cfg.output << "\n";
    if (result.has_metrics) {
      std::cout << metric_report_to_json(result.report) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_segment(const PipelineConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.output.empty()) {
      return fail("segment: no output path");
    }
    const std::string cloud_path = cloud_input(cfg);
    const auto labels_path = labels_input(cfg);
    if (!labels_path) {
      return fail("segment: needs a labels .json input with point_labels");
    }
    const PointCloud pc = load_cloud(cloud_path);
    const SceneLabels labels = read_labels(read_file(*labels_path));
    if (!labels.point_labels) {
      return fail("segment: " + *labels_path + " has no point_labels");
    }
    int max_label = 0;
    for (int label : *labels.point_labels) {
      max_label = std::max(max_label, label);
    }
    const std::size_t n_classes = static_cast<std::size_t>(max_label) + 1;

    const PipelineResult result =
        segment_scene(pc, *labels.point_labels, n_classes, cfg);

    SceneLabels out;
    out.frame = pc.frame_id;
    out.point_labels = result.prediction.point_labels;
    write_file(cfg.output, write_labels(out));

    std::cerr << "segment: " << pc.size() << " points, "
              << result.report.patches_processed << " patches -> "
              << cfg.output << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_gen(const PipelineConfig& cfg) {
  try {
    if (cfg.output.empty()) {
      return fail("gen: no output path");
    }
    SceneSpec spec;
    if (!cfg.inputs.empty()) {
      spec = parse_scene_spec(read_file(cfg.inputs[0]));
    }
    if (cfg.seed) {
      spec.seed = *cfg.seed;
    }
    const LabeledScene scene = gen_scene(spec);

    std::string labels_path = cfg.output;
    if (labels_path.size() >= 4 &&
        labels_path.compare(labels_path.size() - 4, 4, ".bin") == 0) {
      labels_path.resize(labels_path.size() - 4);
    }
    labels_path += ".labels.json";

    const auto bytes = write_point_bin(scene.cloud);
    write_file(cfg.output, std::span<const std::uint8_t>(bytes));
    SceneLabels labels;
    labels.frame = scene.cloud.frame_id;
    labels.gt_boxes = scene.gt_boxes;
    labels.point_labels = scene.point_labels;
    write_file(labels_path, write_labels(labels));

    std::cerr << "gen: " << scene.cloud.size() << " points, "
              << scene.gt_boxes.size() << " boxes -> " << cfg.output << ", "
              << labels_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_bench(const PipelineConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.mode != SplitMode::kPatches) {
      return fail("bench: patch mode only");
    }
    const PointCloud pc = load_cloud(cloud_input(cfg));
    const PatchParams params = patch_params_for(cfg, pc);
    const ClusterPerceiver perceiver(cfg.cluster);
    const MetricReport report =
        bench_throughput(pc, params, perceiver, cfg.bench_repetitions,
                         cfg.nms_iou, cfg.threads);
    const std::string line = metric_report_to_json(report);
    std::cout << line << "\n";
    if (!cfg.output.empty()) {
      write_file(cfg.output, line + "\n");
    }
    std::cerr << "bench: " << report.patches_processed << " patches, "
              << report.wall_time_sec << " s median\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_render(const PipelineConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.output.empty()) {
      return fail("render: no output path");
    }
    const PointCloud pc = load_cloud(cloud_input(cfg));
    std::vector<OrientedBox> gt_boxes;
    std::vector<OrientedBox> pred_boxes;
    for (const std::string& path : cfg.inputs) {
      if (!is_json_path(path)) {
        continue;
      }
      const std::string text = read_file(path);
      // Labels carry point_labels or score-less boxes; anything else is a
      // prediction file.
      bool as_labels = text.find("\"point_labels\"") != std::string::npos;
      if (!as_labels) {
        try {
          pred_boxes = read_predictions(text).boxes;
        } catch (const io_error&) {
          as_labels = true;
        }
      }
      if (as_labels) {
        gt_boxes = read_labels(text).gt_boxes;
      }
    }

    RenderOptions options;
    if (cfg.render_patches && cfg.mode == SplitMode::kPatches) {
      options.lattice = patch_params_for(cfg, pc);
    }
    write_file(cfg.output,
               render_scene_svg(pc, gt_boxes, pred_boxes, options));
    std::cerr << "render: " << pc.size() << " points -> " << cfg.output
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace azinorm
