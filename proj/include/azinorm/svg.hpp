#ifndef AZINORM_SVG_HPP_
#define AZINORM_SVG_HPP_

#include <optional>
#include <string>
#include <vector>

#include "azinorm/geom.hpp"
#include "azinorm/patching.hpp"

namespace azinorm {

struct RenderOptions {
  // Patch lattice overlay (layout outlines at every enumerated center).
  std::optional<PatchParams> lattice;
  double point_radius = 0.12;  // meters
  double margin = 2.0;         // meters of padding around the data
};

// Static BEV figure: points as dots, GT boxes stroked blue, predicted boxes
// stroked green, plus the coordinate frame. Output is deterministic for
// identical inputs.
std::string render_scene_svg(const PointCloud& pc,
                             const std::vector<OrientedBox>& gt_boxes,
                             const std::vector<OrientedBox>& pred_boxes,
                             const RenderOptions& options);

}  // namespace azinorm

#endif  // AZINORM_SVG_HPP_
