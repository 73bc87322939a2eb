#include "azinorm/perceive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace azinorm {

namespace {

// Path-compressed union-find over patch-local point indices.
struct DisjointSet {
  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) {
      parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::size_t> parent;
};

std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
}

// Fits the tightest rectangle with heading `yaw` around the members.
OrientedBox fit_box(const std::vector<Point>& members, double yaw,
                    double default_height) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  double qx_min = 0.0, qx_max = 0.0, qy_min = 0.0, qy_max = 0.0;
  double z_min = 0.0, z_max = 0.0;
  bool first = true;
  for (const Point& p : members) {
    const double qx = c * p.x + s * p.y;   // rotate by -yaw
    const double qy = -s * p.x + c * p.y;
    if (first) {
      qx_min = qx_max = qx;
      qy_min = qy_max = qy;
      z_min = z_max = p.z;
      first = false;
    } else {
      qx_min = std::min(qx_min, qx);
      qx_max = std::max(qx_max, qx);
      qy_min = std::min(qy_min, qy);
      qy_max = std::max(qy_max, qy);
      z_min = std::min(z_min, p.z);
      z_max = std::max(z_max, p.z);
    }
  }
  // Dimension floor keeps degenerate (collinear / single-point) clusters
  // inside the l,w,h > 0 box invariant.
  constexpr double kMinDim = 1e-3;
  const double qx_mid = (qx_min + qx_max) / 2.0;
  const double qy_mid = (qy_min + qy_max) / 2.0;
  OrientedBox box;
  box.cx = c * qx_mid - s * qy_mid;  // rotate back by +yaw
  box.cy = s * qx_mid + c * qy_mid;
  box.cz = (z_min + z_max) / 2.0;
  box.length = std::max(qx_max - qx_min, kMinDim);
  box.width = std::max(qy_max - qy_min, kMinDim);
  const double z_extent = z_max - z_min;
  box.height = z_extent < 0.1 ? default_height : z_extent;
  box.yaw = wrap_angle(yaw);
  box.score = std::min(1.0, static_cast<double>(members.size()) / 100.0);
  return box;
}

// Principal BEV axis direction in (-pi/2, pi/2]; 0 when the covariance gives
// no preferred direction.
double principal_axis_yaw(const std::vector<Point>& members) {
  const double n = static_cast<double>(members.size());
  double mx = 0.0, my = 0.0;
  for (const Point& p : members) {
    mx += p.x;
    my += p.y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const Point& p : members) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  constexpr double kDegenerate = 1e-12;
  if (std::abs(sxy) < kDegenerate && std::abs(sxx - syy) < kDegenerate) {
    return 0.0;
  }
  return 0.5 * std::atan2(2.0 * sxy, sxx - syy);
}

}  // namespace

PatchPrediction oracle_detect(const Patch& /*patch*/,
                              const std::vector<OrientedBox>& gt_patch_frame,
                              const PatchParams& params) {
  PatchPrediction out;
  for (const OrientedBox& b : gt_patch_frame) {
    if (in_layout(params, Vec2{0.0, 0.0}, b.cx, b.cy)) {
      OrientedBox kept = b;
      kept.score = 1.0;
      out.boxes.push_back(kept);
    }
  }
  return out;
}

PatchPrediction cluster_detect(const Patch& patch,
                               const ClusterParams& params) {
  if (!(params.link_radius > 0.0) || params.min_cluster < 1) {
    throw std::invalid_argument("cluster params: link_radius > 0 and "
                                "min_cluster >= 1 required");
  }
  const std::vector<Point>& pts = patch.normalized_points.points;
  const std::size_t n = pts.size();
  PatchPrediction out;
  if (n == 0) {
    return out;
  }

  // Single-link pass over a link_radius grid; only the 3x3 neighborhood can
  // hold points within reach.
  const double cell = params.link_radius;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(n);
  const auto cell_of = [cell](double v) {
    return static_cast<std::int64_t>(std::floor(v / cell));
  };
  for (std::size_t i = 0; i < n; ++i) {
    grid[cell_key(cell_of(pts[i].x), cell_of(pts[i].y))].push_back(i);
  }
  DisjointSet ds(n);
  const double link2 = params.link_radius * params.link_radius;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t cx = cell_of(pts[i].x);
    const std::int64_t cy = cell_of(pts[i].y);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid.find(cell_key(cx + dx, cy + dy));
        if (it == grid.end()) {
          continue;
        }
        for (std::size_t j : it->second) {
          if (j <= i) {
            continue;
          }
          const double ddx = pts[i].x - pts[j].x;
          const double ddy = pts[i].y - pts[j].y;
          if (ddx * ddx + ddy * ddy <= link2) {
            ds.unite(i, j);
          }
        }
      }
    }
  }

  // Group members by root; roots are the minimum member index, so iterating
  // ascending gives the deterministic cluster order for free.
  std::unordered_map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    clusters[ds.find(i)].push_back(i);
  }
  std::vector<std::size_t> roots;
  roots.reserve(clusters.size());
  for (const auto& [root, members] : clusters) {
    if (members.size() >= params.min_cluster) {
      roots.push_back(root);
    }
  }
  std::sort(roots.begin(), roots.end());

  for (std::size_t root : roots) {
    std::vector<Point> members;
    members.reserve(clusters[root].size());
    for (std::size_t i : clusters[root]) {
      members.push_back(pts[i]);
    }
    // Value-ordered accumulation so the geometry is bit-identical under any
    // permutation of the patch's points.
    std::sort(members.begin(), members.end(),
              [](const Point& a, const Point& b) {
                if (a.x != b.x) return a.x < b.x;
                if (a.y != b.y) return a.y < b.y;
                if (a.z != b.z) return a.z < b.z;
                return a.intensity < b.intensity;
              });
    const double yaw = principal_axis_yaw(members);
    out.boxes.push_back(fit_box(members, yaw, params.default_height));
  }
  return out;
}

PatchPrediction knn_segment(const Patch& patch, const PointCloud& refs,
                            const std::vector<int>& ref_labels, std::size_t k,
                            std::size_t n_classes) {
  if (k < 1) {
    throw std::invalid_argument("knn_segment: k must be >= 1");
  }
  if (ref_labels.size() != refs.size()) {
    throw std::invalid_argument("knn_segment: one label per reference point "
                                "required");
  }
  const std::size_t n = patch.normalized_points.size();
  PatchPrediction out;
  if (n == 0) {
    return out;
  }
  if (refs.empty()) {
    throw std::invalid_argument("knn_segment: empty reference cloud");
  }
  for (int label : ref_labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw std::invalid_argument("knn_segment: reference label out of range");
    }
  }

  const std::size_t k_eff = std::min(k, refs.size());
  out.point_probs.reserve(n);
  std::vector<std::pair<double, std::size_t>> dist;
  for (const Point& p : patch.normalized_points.points) {
    dist.clear();
    dist.reserve(refs.size());
    for (std::size_t r = 0; r < refs.size(); ++r) {
      const Point& q = refs.points[r];
      const double dx = p.x - q.x;
      const double dy = p.y - q.y;
      const double dz = p.z - q.z;
      dist.emplace_back(dx * dx + dy * dy + dz * dz, r);
    }
    std::nth_element(dist.begin(), dist.begin() + (k_eff - 1), dist.end());
    std::vector<double> row(n_classes, 0.0);
    for (std::size_t j = 0; j < k_eff; ++j) {
      row[static_cast<std::size_t>(ref_labels[dist[j].second])] +=
          1.0 / static_cast<double>(k_eff);
    }
    out.point_probs.push_back(std::move(row));
  }
  return out;
}

PatchPrediction OraclePerceiver::perceive(const Patch& patch) const {
  std::vector<OrientedBox> gt_patch_frame;
  gt_patch_frame.reserve(scene_gt_.size());
  for (const OrientedBox& b : scene_gt_) {
    gt_patch_frame.push_back(normalize_box(patch.transform, b));
  }
  return oracle_detect(patch, gt_patch_frame, params_);
}

PatchPrediction KnnSelfSegmenter::perceive(const Patch& patch) const {
  PointCloud refs = patch.normalized_points;
  std::vector<int> labels;
  labels.reserve(patch.point_indices.size());
  for (std::size_t i : patch.point_indices) {
    if (i >= scene_labels_.size()) {
      throw std::invalid_argument("knn segmenter: patch indexes a point "
                                  "without a label");
    }
    labels.push_back(scene_labels_[i]);
  }
  return knn_segment(patch, refs, labels, k_, n_classes_);
}

}  // namespace azinorm
