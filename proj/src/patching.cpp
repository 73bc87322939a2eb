#include "azinorm/patching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "azinorm/rng.hpp"

namespace azinorm {

namespace {

std::uint64_t cell_key(std::int64_t cx, std::int64_t cy) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
}

std::int64_t cell_of(double v, double cell_size) {
  return static_cast<std::int64_t>(std::floor(v / cell_size));
}

}  // namespace

void validate(const PatchParams& params) {
  if (params.layout == PatchLayout::kCircle && !(params.radius > 0.0)) {
    throw std::invalid_argument("patch params: radius must be > 0");
  }
  if (params.layout == PatchLayout::kSquare && !(params.side > 0.0)) {
    throw std::invalid_argument("patch params: side must be > 0");
  }
  if (!(params.stride > 0.0)) {
    throw std::invalid_argument("patch params: stride must be > 0");
  }
  if (params.bounds.min_x > params.bounds.max_x ||
      params.bounds.min_y > params.bounds.max_y) {
    throw std::invalid_argument("patch params: inverted bounds");
  }
  if (params.z_range && params.z_range->first > params.z_range->second) {
    throw std::invalid_argument("patch params: inverted z range");
  }
}

bool in_layout(const PatchParams& params, Vec2 center, double x, double y) {
  const double dx = x - center.x;
  const double dy = y - center.y;
  if (params.layout == PatchLayout::kCircle) {
    return dx * dx + dy * dy <= params.radius * params.radius;
  }
  const double half = params.side / 2.0;
  return std::abs(dx) <= half && std::abs(dy) <= half;
}

SpatialIndex::SpatialIndex(const PointCloud& pc, double cell_size)
    : cell_size_(cell_size), count_(pc.size()) {
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("spatial index: cell size must be > 0");
  }
  for (std::size_t i = 0; i < pc.points.size(); ++i) {
    const Point& p = pc.points[i];
    cells_[cell_key(cell_of(p.x, cell_size_), cell_of(p.y, cell_size_))]
        .push_back(i);
  }
}

std::vector<std::size_t> SpatialIndex::candidates_in_rect(Vec2 lo,
                                                          Vec2 hi) const {
  std::vector<std::size_t> out;
  const std::int64_t cx0 = cell_of(lo.x, cell_size_);
  const std::int64_t cx1 = cell_of(hi.x, cell_size_);
  const std::int64_t cy0 = cell_of(lo.y, cell_size_);
  const std::int64_t cy1 = cell_of(hi.y, cell_size_);
  for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
      auto it = cells_.find(cell_key(cx, cy));
      if (it != cells_.end()) {
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  }
  return out;
}

SpatialIndex build_index(const PointCloud& pc, double cell_size) {
  return SpatialIndex(pc, cell_size);
}

std::vector<Vec2> enumerate_centers(const PatchParams& params) {
  validate(params);
  const double d = params.stride;
  // Tiny slack so bounds sitting exactly on a lattice line stay closed.
  constexpr double kEps = 1e-9;
  const auto lo_index = [&](double v) {
    return static_cast<std::int64_t>(std::ceil(v / d - kEps));
  };
  const auto hi_index = [&](double v) {
    return static_cast<std::int64_t>(std::floor(v / d + kEps));
  };
  const std::int64_t ix0 = lo_index(params.bounds.min_x);
  const std::int64_t ix1 = hi_index(params.bounds.max_x);
  const std::int64_t iy0 = lo_index(params.bounds.min_y);
  const std::int64_t iy1 = hi_index(params.bounds.max_y);
  std::vector<Vec2> centers;
  if (ix0 > ix1 || iy0 > iy1) {
    return centers;
  }
  centers.reserve(static_cast<std::size_t>((ix1 - ix0 + 1) * (iy1 - iy0 + 1)));
  for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
      centers.push_back(Vec2{static_cast<double>(ix) * d,
                             static_cast<double>(iy) * d});
    }
  }
  return centers;
}

Patch extract_patch(const PointCloud& pc, const SpatialIndex& index,
                    Vec2 center, const PatchParams& params) {
  const double reach = params.reach();
  Patch patch;
  patch.center = center;
  patch.transform = NormTransform::for_center(center);
  std::vector<std::size_t> candidates = index.candidates_in_rect(
      Vec2{center.x - reach, center.y - reach},
      Vec2{center.x + reach, center.y + reach});
  patch.point_indices.reserve(candidates.size());
  for (std::size_t i : candidates) {
    const Point& p = pc.points[i];
    if (!in_layout(params, center, p.x, p.y)) {
      continue;
    }
    if (params.z_range &&
        (p.z < params.z_range->first || p.z > params.z_range->second)) {
      continue;
    }
    patch.point_indices.push_back(i);
  }
  std::sort(patch.point_indices.begin(), patch.point_indices.end());
  patch.normalized_points =
      normalize_cloud(patch.transform, pc, patch.point_indices);
  return patch;
}

std::vector<Patch> split_scene(const PointCloud& pc, const PatchParams& params,
                               unsigned threads) {
  validate(params);
  const std::vector<Vec2> centers = enumerate_centers(params);
  const SpatialIndex index(pc, params.reach() > 0.0 ? params.reach() : 1.0);

  std::vector<Patch> slots(centers.size());
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      slots[k] = extract_patch(pc, index, centers[k], params);
    }
  };
  if (threads <= 1 || centers.size() < 2) {
    work(0, centers.size());
  } else {
    const std::size_t n_workers =
        std::min<std::size_t>(threads, centers.size());
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    const std::size_t chunk = (centers.size() + n_workers - 1) / n_workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(begin + chunk, centers.size());
      if (begin < end) {
        pool.emplace_back(work, begin, end);
      }
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  std::vector<Patch> out;
  out.reserve(slots.size());
  for (Patch& patch : slots) {
    if (patch.size() >= params.min_points) {
      out.push_back(std::move(patch));
    }
  }
  return out;
}

std::vector<Patch> sample_positive(const std::vector<Patch>& patches,
                                   const std::vector<OrientedBox>& gt_boxes,
                                   const PatchParams& params, double neg_ratio,
                                   std::uint64_t seed) {
  if (!(neg_ratio >= 0.0) || !std::isfinite(neg_ratio)) {
    throw std::invalid_argument("sample_positive: neg_ratio must be >= 0");
  }
  std::vector<bool> keep(patches.size(), false);
  std::vector<std::size_t> background;
  std::size_t n_foreground = 0;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    bool foreground = false;
    for (const OrientedBox& b : gt_boxes) {
      if (in_layout(params, patches[i].center, b.cx, b.cy)) {
        foreground = true;
        break;
      }
    }
    if (foreground) {
      keep[i] = true;
      ++n_foreground;
    } else {
      background.push_back(i);
    }
  }

  const std::size_t want = static_cast<std::size_t>(
      std::llround(neg_ratio * static_cast<double>(n_foreground)));
  const std::size_t n_sample = std::min(want, background.size());
  Rng rng(seed);
  for (std::size_t j = 0; j < n_sample; ++j) {
    const std::size_t pick =
        j + static_cast<std::size_t>(rng.below(background.size() - j));
    std::swap(background[j], background[pick]);
    keep[background[j]] = true;
  }

  std::vector<Patch> out;
  out.reserve(n_foreground + n_sample);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    if (keep[i]) {
      out.push_back(patches[i]);
    }
  }
  return out;
}

Bounds2D cloud_bounds_bev(const PointCloud& pc) {
  if (pc.empty()) {
    return Bounds2D{};
  }
  Bounds2D b{pc.points[0].x, pc.points[0].y, pc.points[0].x, pc.points[0].y};
  for (const Point& p : pc.points) {
    b.min_x = std::min(b.min_x, p.x);
    b.min_y = std::min(b.min_y, p.y);
    b.max_x = std::max(b.max_x, p.x);
    b.max_y = std::max(b.max_y, p.y);
  }
  return b;
}

}  // namespace azinorm
