#ifndef AZINORM_PERCEIVE_HPP_
#define AZINORM_PERCEIVE_HPP_

#include <cstddef>
#include <memory>
#include <vector>

#include "azinorm/geom.hpp"
#include "azinorm/patching.hpp"

namespace azinorm {

/// Per-patch perceiver output, everything in the patch frame. point_probs is
/// one row of class probabilities per patch point (empty when the perceiver
/// does not segment); every row is non-negative and sums to 1.
struct PatchPrediction {
  std::vector<OrientedBox> boxes;
  std::vector<std::vector<double>> point_probs;
};

/// The pluggable per-patch perception contract. Implementations must be
/// deterministic and frame-local: the output may depend only on the patch's
/// normalized points, never on where the patch sits in the scene. That
/// locality is what makes the whole pipeline azimuth-invariant.
class Perceiver {
 public:
  virtual ~Perceiver() = default;
  virtual bool detects() const = 0;
  virtual bool segments() const = 0;
  virtual PatchPrediction perceive(const Patch& patch) const = 0;
};

struct ClusterParams {
  double link_radius = 1.0;       // BEV single-link distance
  std::size_t min_cluster = 5;
  double default_height = 1.6;    // used when the z extent is < 0.1 m
};

// Returns exactly the given patch-frame GT boxes whose centers lie inside the
// layout region centered at the origin, each with score 1. The caller is
// responsible for transforming GT into the patch frame.
PatchPrediction oracle_detect(const Patch& patch,
                              const std::vector<OrientedBox>& gt_patch_frame,
                              const PatchParams& params);

// Deterministic geometric detector: single-link BEV clustering, one tight
// rectangle per surviving cluster oriented along the cluster's principal
// axis. Yaw is only defined modulo pi (a rectangle has no front); isotropic
// or single-point clusters get yaw 0. Cluster order follows the smallest
// member index.
PatchPrediction cluster_detect(const Patch& patch, const ClusterParams& params);

// Per patch point: label histogram of its k nearest reference points (3D
// distance, ties broken by lower reference index), divided by k. Refs must be
// in the patch frame.
PatchPrediction knn_segment(const Patch& patch, const PointCloud& refs,
                            const std::vector<int>& ref_labels, std::size_t k,
                            std::size_t n_classes);

/// Perfect detector for plumbing checks: holds the scene GT and pushes it
/// through each patch's own transform before the in-region test.
class OraclePerceiver : public Perceiver {
 public:
  OraclePerceiver(std::vector<OrientedBox> scene_gt, PatchParams params)
      : scene_gt_(std::move(scene_gt)), params_(std::move(params)) {}
  bool detects() const override { return true; }
  bool segments() const override { return false; }
  PatchPrediction perceive(const Patch& patch) const override;

 private:
  std::vector<OrientedBox> scene_gt_;
  PatchParams params_;
};

class ClusterPerceiver : public Perceiver {
 public:
  explicit ClusterPerceiver(ClusterParams params) : params_(params) {}
  bool detects() const override { return true; }
  bool segments() const override { return false; }
  PatchPrediction perceive(const Patch& patch) const override {
    return cluster_detect(patch, params_);
  }

 private:
  ClusterParams params_;
};

/// Segmenter that uses the patch's own points as labeled references; with
/// k=1 every covered point reproduces its own label, which exercises the
/// probability-averaging merge end to end.
class KnnSelfSegmenter : public Perceiver {
 public:
  KnnSelfSegmenter(std::vector<int> scene_labels, std::size_t k,
                   std::size_t n_classes)
      : scene_labels_(std::move(scene_labels)), k_(k), n_classes_(n_classes) {}
  bool detects() const override { return false; }
  bool segments() const override { return true; }
  PatchPrediction perceive(const Patch& patch) const override;

 private:
  std::vector<int> scene_labels_;
  std::size_t k_;
  std::size_t n_classes_;
};

}  // namespace azinorm

#endif  // AZINORM_PERCEIVE_HPP_
