#ifndef AZINORM_PIPELINE_HPP_
#define AZINORM_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "azinorm/merge.hpp"
#include "azinorm/patching.hpp"
#include "azinorm/perceive.hpp"
#include "azinorm/scene_io.hpp"
#include "azinorm/sectorial.hpp"
#include "azinorm/synth.hpp"

namespace azinorm {

enum class SplitMode { kPatches, kSectors };
enum class PerceiverKind { kOracle, kCluster, kKnn };

/// Everything the batch entry points need. Exactly one split mode is active:
/// layout circle/square selects the patch pipeline, sector mode the sectorial
/// one.
struct PipelineConfig {
  std::vector<std::string> inputs;  // cloud path, optional labels .json
  std::string output;

  SplitMode mode = SplitMode::kPatches;
  PatchLayout layout = PatchLayout::kCircle;
  double radius = 9.6;
  double side = 17.6;
  double stride = 6.4;
  std::size_t min_points = 5;
  std::optional<std::pair<double, double>> z_range;

  std::size_t sectors = 4;
  double overlap_rad = 5.0 * 0.017453292519943295;

  PerceiverKind perceiver = PerceiverKind::kCluster;
  ClusterParams cluster;
  std::size_t knn_k = 1;

  double nms_iou = 0.1;
  std::optional<double> neg_ratio;  // positive sampling when set (needs GT)
  std::optional<std::uint64_t> seed;
  std::size_t bench_repetitions = 3;
  unsigned threads = 1;
  bool render_patches = false;
};

// Parameter/consistency checks that touch no files and no outputs. Throws
// std::invalid_argument.
void validate(const PipelineConfig& cfg);

// Patch parameters for this config over this cloud; bounds come from the
// data extent so the lattice adapts to any scene.
PatchParams patch_params_for(const PipelineConfig& cfg, const PointCloud& pc);
SectorParams sector_params_for(const PipelineConfig& cfg);

struct PipelineResult {
  ScenePrediction prediction;
  MetricReport report;
  bool has_metrics = false;  // recall/precision present (GT was supplied)
};

// In-memory pipelines (no file I/O). `gt` may be null; the oracle perceiver
// and positive sampling require it.
PipelineResult detect_scene(const PointCloud& pc, const LabeledScene* gt,
                            const PipelineConfig& cfg);
PipelineResult segment_scene(const PointCloud& pc,
                             const std::vector<int>& point_labels,
                             std::size_t n_classes, const PipelineConfig& cfg);

// File-level subcommands shared by the CLI tool and the tests. They validate
// before touching any output, report failures on stderr and return a process
// exit status.
int cmd_detect(const PipelineConfig& cfg);
int cmd_segment(const PipelineConfig& cfg);
int cmd_gen(const PipelineConfig& cfg);
int cmd_bench(const PipelineConfig& cfg);
int cmd_render(const PipelineConfig& cfg);

}  // namespace azinorm

#endif  // AZINORM_PIPELINE_HPP_
