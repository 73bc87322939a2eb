#ifndef AZINORM_SCENE_IO_HPP_
#define AZINORM_SCENE_IO_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "azinorm/geom.hpp"

namespace azinorm {

/// Structured read/write failure. The message always names the offending
/// location (byte offset, record index, line number or JSON field path).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct LabeledScene {
  PointCloud cloud;
  std::vector<OrientedBox> gt_boxes;
  // One class id per point when present.
  std::optional<std::vector<int>> point_labels;
};

struct Predictions {
  std::string frame;
  std::vector<OrientedBox> boxes;
};

struct SceneLabels {
  std::string frame;
  std::vector<OrientedBox> gt_boxes;
  std::optional<std::vector<int>> point_labels;
};

// Point binary: headerless records of 4 little-endian IEEE-754 float32
// (x, y, z, intensity). Values are widened to double on read and narrowed
// back on write. Rejects truncated records and non-finite values.
PointCloud read_point_bin(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_point_bin(const PointCloud& pc);

// Text points: one point per line, 3 or 4 whitespace/comma separated numbers;
// '#' lines and blank lines are skipped. Missing intensity defaults to 0.
PointCloud read_ascii_xyz(const std::string& text);

// Predictions JSON: {"frame": string, "boxes": [{cx,cy,cz,l,w,h,yaw,score,
// class_id}]}. Doubles round-trip exactly (shortest decimal form that parses
// back to the same 64-bit value).
std::string write_predictions(const Predictions& preds);
Predictions read_predictions(const std::string& text);

// Labels JSON: the prediction box schema without "score", plus an optional
// "point_labels" integer array.
std::string write_labels(const SceneLabels& labels);
SceneLabels read_labels(const std::string& text);

// File helpers; throw io_error naming the path.
std::string read_file(const std::string& path);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file(const std::string& path, const std::string& text);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

// Loads a point cloud by extension: ".bin" binary records, anything else is
// parsed as text.
PointCloud load_cloud(const std::string& path);

}  // namespace azinorm

#endif  // AZINORM_SCENE_IO_HPP_
