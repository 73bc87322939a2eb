// Batch entry point: detect | segment | gen | bench | render.

#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "azinorm/pipeline.hpp"

namespace {

using azinorm::PatchLayout;
using azinorm::PerceiverKind;
using azinorm::PipelineConfig;
using azinorm::SplitMode;

struct CommonFlags {
  std::string layout = "circle";
  std::string perceiver = "cluster";
  std::string preset;
  double overlap_deg = 5.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double neg_ratio = 0.0;
  bool neg_ratio_set = false;
};

void add_common(CLI::App* cmd, PipelineConfig& cfg, CommonFlags& flags) {
  cmd->add_option("--input", cfg.inputs,
                  "input path(s): point cloud (.bin or text) and optionally "
                  "a labels .json");
  cmd->add_option("--output", cfg.output, "output path");
  cmd->add_option("--layout", flags.layout, "circle | square | sector")
      ->check(CLI::IsMember({"circle", "square", "sector"}));
  cmd->add_option("--radius", cfg.radius, "circular patch radius [m]");
  cmd->add_option("--side", cfg.side, "square patch side [m]");
  cmd->add_option("--stride", cfg.stride, "patch lattice stride [m]");
  cmd->add_option("--min-points", cfg.min_points,
                  "negative filtering threshold");
  cmd->add_option("--sectors", cfg.sectors, "sector count K");
  cmd->add_option("--overlap-deg", flags.overlap_deg,
                  "sector half-overlap per side [deg]");
  cmd->add_option("--perceiver", flags.perceiver, "oracle | cluster | knn")
      ->check(CLI::IsMember({"oracle", "cluster", "knn"}));
  cmd->add_option("--nms-iou", cfg.nms_iou, "NMS IoU threshold");
  cmd->add_option("--neg-ratio", flags.neg_ratio,
                  "background:foreground sampling ratio (needs GT)")
      ->each([&flags](const std::string&) { flags.neg_ratio_set = true; });
  cmd->add_option("--seed", flags.seed, "seed for sampling / generation")
      ->each([&flags](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--preset", flags.preset,
                  "paper (r=9.6, d=6.4) | fast (r=11.2, d=18.8)")
      ->check(CLI::IsMember({"paper", "fast"}));
  cmd->add_option("--threads", cfg.threads, "worker threads");
  cmd->add_flag("--render-patches", cfg.render_patches,
                "overlay the patch lattice (render)");
}

void finalize(PipelineConfig& cfg, const CommonFlags& flags) {
  if (flags.preset == "paper") {
    cfg.radius = 9.6;
    cfg.stride = 6.4;
  } else if (flags.preset == "fast") {
    cfg.radius = 11.2;
    cfg.stride = 18.8;
  }
  if (flags.layout == "circle") {
    cfg.mode = SplitMode::kPatches;
    cfg.layout = PatchLayout::kCircle;
  } else if (flags.layout == "square") {
    cfg.mode = SplitMode::kPatches;
    cfg.layout = PatchLayout::kSquare;
  } else {
    cfg.mode = SplitMode::kSectors;
  }
  if (flags.perceiver == "oracle") {
    cfg.perceiver = PerceiverKind::kOracle;
  } else if (flags.perceiver == "knn") {
    cfg.perceiver = PerceiverKind::kKnn;
  } else {
    cfg.perceiver = PerceiverKind::kCluster;
  }
  cfg.overlap_rad = flags.overlap_deg * std::numbers::pi / 180.0;
  if (flags.seed_set) {
    cfg.seed = flags.seed;
  }
  if (flags.neg_ratio_set) {
    cfg.neg_ratio = flags.neg_ratio;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Azimuth-normalized LiDAR patch pipeline"};
  app.require_subcommand(1);

  PipelineConfig cfg;
  CommonFlags flags;

  CLI::App* detect = app.add_subcommand(
      "detect", "split, perceive per patch, merge boxes");
  CLI::App* segment = app.add_subcommand(
      "segment", "split, segment per patch, average per-point predictions");
  CLI::App* gen = app.add_subcommand(
      "gen", "generate a synthetic scene (binary points + labels JSON)");
  CLI::App* bench = app.add_subcommand(
      "bench", "end-to-end throughput report as one JSON line");
  CLI::App* render = app.add_subcommand("render", "write a BEV SVG figure");
  for (CLI::App* cmd : {detect, segment, gen, bench, render}) {
    add_common(cmd, cfg, flags);
  }

  CLI11_PARSE(app, argc, argv);
  finalize(cfg, flags);

  if (detect->parsed()) {
    return azinorm::cmd_detect(cfg);
  }
  if (segment->parsed()) {
    cfg.perceiver = PerceiverKind::kKnn;
    return azinorm::cmd_segment(cfg);
  }
  if (gen->parsed()) {
    return azinorm::cmd_gen(cfg);
  }
  if (bench->parsed()) {
    return azinorm::cmd_bench(cfg);
  }
  if (render->parsed()) {
    return azinorm::cmd_render(cfg);
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
