#include "azinorm/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "azinorm/merge.hpp"

namespace azinorm {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void polygon_element(std::ostringstream& out, const ConvexPolygon& poly,
                     const char* stroke, const char* extra) {
  out << "<polygon points=\"";
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (i) {
      out << ' ';
    }
    out << num(poly[i].x) << ',' << num(poly[i].y);
  }
  out << "\" fill=\"none\" stroke=\"" << stroke << "\" " << extra << "/>\n";
}

}  // namespace

std::string render_scene_svg(const PointCloud& pc,
                             const std::vector<OrientedBox>& gt_boxes,
                             const std::vector<OrientedBox>& pred_boxes,
                             const RenderOptions& options) {
  Bounds2D b{-1.0, -1.0, 1.0, 1.0};
  bool any = false;
  const auto grow = [&](double x, double y) {
    if (!any) {
      b = Bounds2D{x, y, x, y};
      any = true;
    } else {
      b.min_x = std::min(b.min_x, x);
      b.min_y = std::min(b.min_y, y);
      b.max_x = std::max(b.max_x, x);
      b.max_y = std::max(b.max_y, y);
    }
  };
  for (const Point& p : pc.points) {
    grow(p.x, p.y);
  }
  for (const OrientedBox& box : gt_boxes) {
    grow(box.cx, box.cy);
  }
  for (const OrientedBox& box : pred_boxes) {
    grow(box.cx, box.cy);
  }
  grow(0.0, 0.0);  // always show the sensor origin
  b.min_x -= options.margin;
  b.min_y -= options.margin;
  b.max_x += options.margin;
  b.max_y += options.margin;

  const double w = b.max_x - b.min_x;
  const double h = b.max_y - b.min_y;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" "
         "height=\"800\" viewBox=\"" << num(b.min_x) << ' ' << num(-b.max_y)
      << ' ' << num(w) << ' ' << num(h) << "\">\n";
  // LiDAR frame is y-up; SVG is y-down.
  out << "<g transform=\"scale(1,-1)\">\n";

  // Coordinate frame.
  out << "<line x1=\"" << num(b.min_x) << "\" y1=\"0\" x2=\"" << num(b.max_x)
      << "\" y2=\"0\" stroke=\"#cccccc\" stroke-width=\"0.05\"/>\n";
  out << "<line x1=\"0\" y1=\"" << num(b.min_y) << "\" x2=\"0\" y2=\""
      << num(b.max_y) << "\" stroke=\"#cccccc\" stroke-width=\"0.05\"/>\n";

  if (options.lattice) {
    PatchParams params = *options.lattice;
    params.bounds = Bounds2D{b.min_x, b.min_y, b.max_x, b.max_y};
    for (const Vec2& c : enumerate_centers(params)) {
      if (params.layout == PatchLayout::kCircle) {
        out << "<circle cx=\"" << num(c.x) << "\" cy=\"" << num(c.y)
            << "\" r=\"" << num(params.radius)
            << "\" fill=\"none\" stroke=\"#eeeeee\" stroke-width=\"0.04\"/>\n";
      } else {
        const double half = params.side / 2.0;
        out << "<rect x=\"" << num(c.x - half) << "\" y=\"" << num(c.y - half)
            << "\" width=\"" << num(params.side) << "\" height=\""
            << num(params.side)
            << "\" fill=\"none\" stroke=\"#eeeeee\" stroke-width=\"0.04\"/>\n";
      }
    }
  }

  for (const Point& p : pc.points) {
    out << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y) << "\" r=\""
        << num(options.point_radius)
        << "\" fill=\"#555555\" fill-opacity=\"0.6\"/>\n";
  }
  for (const OrientedBox& box : gt_boxes) {
    polygon_element(out, box_corners_bev(box), "#1f77b4",
                    "stroke-width=\"0.12\"");
  }
  for (const OrientedBox& box : pred_boxes) {
    polygon_element(out, box_corners_bev(box), "#2ca02c",
                    "stroke-width=\"0.12\" stroke-dasharray=\"0.4,0.2\"");
  }

  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace azinorm
