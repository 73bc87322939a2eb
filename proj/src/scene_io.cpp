#include "azinorm/scene_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace azinorm {

namespace {

using nlohmann::json;

float decode_f32_le(const std::uint8_t* b) {
  const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                          (static_cast<std::uint32_t>(b[1]) << 8) |
                          (static_cast<std::uint32_t>(b[2]) << 16) |
                          (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(u);
}

void encode_f32_le(float v, std::vector<std::uint8_t>& out) {
  const std::uint32_t u = std::bit_cast<std::uint32_t>(v);
  out.push_back(static_cast<std::uint8_t>(u & 0xff));
  out.push_back(static_cast<std::uint8_t>((u >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((u >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((u >> 24) & 0xff));
}

double require_number(const json& obj, const std::string& path,
                      const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw io_error(path + "." + key + ": missing field");
  }
  if (!it->is_number()) {
    throw io_error(path + "." + key + ": expected a number");
  }
  return it->get<double>();
}

int require_int(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw io_error(path + "." + key + ": missing field");
  }
  if (!it->is_number_integer()) {
    throw io_error(path + "." + key + ": expected an integer");
  }
  return it->get<int>();
}

OrientedBox box_from_json(const json& obj, const std::string& path,
                          bool with_score) {
  if (!obj.is_object()) {
    throw io_error(path + ": expected an object");
  }
  OrientedBox b;
  b.cx = require_number(obj, path, "cx");
  b.cy = require_number(obj, path, "cy");
  b.cz = require_number(obj, path, "cz");
  b.length = require_number(obj, path, "l");
  b.width = require_number(obj, path, "w");
  b.height = require_number(obj, path, "h");
  b.yaw = require_number(obj, path, "yaw");
  if (with_score) {
    b.score = require_number(obj, path, "score");
  } else {
    b.score = 1.0;
  }
  b.class_id = require_int(obj, path, "class_id");
  if (b.length <= 0.0) {
    throw io_error(path + ".l: must be > 0");
  }
  if (b.width <= 0.0) {
    throw io_error(path + ".w: must be > 0");
  }
  if (b.height <= 0.0) {
    throw io_error(path + ".h: must be > 0");
  }
  return b;
}

json box_to_json(const OrientedBox& b, bool with_score) {
  json obj{{"cx", b.cx},     {"cy", b.cy}, {"cz", b.cz},
           {"l", b.length},  {"w", b.width}, {"h", b.height},
           {"yaw", b.yaw},   {"class_id", b.class_id}};
  if (with_score) {
    obj["score"] = b.score;
  }
  return obj;
}

json parse_document(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw io_error("document: not valid JSON");
  }
  return doc;
}

}  // namespace

PointCloud read_point_bin(std::span<const std::uint8_t> bytes) {
  constexpr std::size_t kRecord = 16;
  if (bytes.size() % kRecord != 0) {
    throw io_error("point binary: truncated record at byte offset " +
                   std::to_string(bytes.size() - bytes.size() % kRecord) +
                   " (length " + std::to_string(bytes.size()) +
                   " is not a multiple of 16)");
  }
  PointCloud pc;
  pc.points.reserve(bytes.size() / kRecord);
  for (std::size_t i = 0; i < bytes.size(); i += kRecord) {
    const double x = decode_f32_le(bytes.data() + i);
    const double y = decode_f32_le(bytes.data() + i + 4);
    const double z = decode_f32_le(bytes.data() + i + 8);
    const double intensity = decode_f32_le(bytes.data() + i + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
        !std::isfinite(intensity)) {
      throw io_error("point binary: non-finite value in record " +
                     std::to_string(i / kRecord));
    }
    pc.points.push_back(Point{x, y, z, intensity});
  }
  return pc;
}

std::vector<std::uint8_t> write_point_bin(const PointCloud& pc) {
  std::vector<std::uint8_t> out;
  out.reserve(pc.size() * 16);
  for (const Point& p : pc.points) {
    encode_f32_le(static_cast<float>(p.x), out);
    encode_f32_le(static_cast<float>(p.y), out);
    encode_f32_le(static_cast<float>(p.z), out);
    encode_f32_le(static_cast<float>(p.intensity), out);
  }
  return out;
}

PointCloud read_ascii_xyz(const std::string& text) {
  PointCloud pc;
  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    // Normalize separators, then tokenize.
    for (char& ch : line) {
      if (ch == ',' || ch == '\t' || ch == '\r') {
        ch = ' ';
      }
    }
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      if (values.empty() && token[0] == '#') {
        break;  // comment line
      }
      std::size_t consumed = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &consumed);
      } catch (const std::exception&) {
        throw io_error("text points: malformed number at line " +
                       std::to_string(line_no));
      }
      if (consumed != token.size() || !std::isfinite(v)) {
        throw io_error("text points: malformed number at line " +
                       std::to_string(line_no));
      }
      values.push_back(v);
    }
    if (values.empty()) {
      continue;  // blank or comment
    }
    if (values.size() != 3 && values.size() != 4) {
      throw io_error("text points: expected 3 or 4 values at line " +
                     std::to_string(line_no) + ", got " +
                     std::to_string(values.size()));
    }
    pc.points.push_back(Point{values[0], values[1], values[2],
                              values.size() == 4 ? values[3] : 0.0});
  }
  return pc;
}

std::string write_predictions(const Predictions& preds) {
  json boxes = json::array();
  for (const OrientedBox& b : preds.boxes) {
    boxes.push_back(box_to_json(b, true));
  }
  json doc{{"frame", preds.frame}, {"boxes", std::move(boxes)}};
  return doc.dump();
}

Predictions read_predictions(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) {
    throw io_error("document: expected an object");
  }
  Predictions out;
  auto frame = doc.find("frame");
  if (frame == doc.end() || !frame->is_string()) {
    throw io_error("frame: missing or not a string");
  }
  out.frame = frame->get<std::string>();
  auto boxes = doc.find("boxes");
  if (boxes == doc.end() || !boxes->is_array()) {
    throw io_error("boxes: missing or not an array");
  }
  out.boxes.reserve(boxes->size());
  for (std::size_t i = 0; i < boxes->size(); ++i) {
    out.boxes.push_back(
        box_from_json((*boxes)[i], "boxes[" + std::to_string(i) + "]", true));
  }
  return out;
}

std::string write_labels(const SceneLabels& labels) {
  json boxes = json::array();
  for (const OrientedBox& b : labels.gt_boxes) {
    boxes.push_back(box_to_json(b, false));
  }
  json doc{{"frame", labels.frame}, {"boxes", std::move(boxes)}};
  if (labels.point_labels.has_value()) {
    doc["point_labels"] = *labels.point_labels;
  }
  return doc.dump();
}

SceneLabels read_labels(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) {
    throw io_error("document: expected an object");
  }
  SceneLabels out;
  auto frame = doc.find("frame");
  if (frame == doc.end() || !frame->is_string()) {
    throw io_error("frame: missing or not a string");
  }
  out.frame = frame->get<std::string>();
  auto boxes = doc.find("boxes");
  if (boxes == doc.end() || !boxes->is_array()) {
    throw io_error("boxes: missing or not an array");
  }
  out.gt_boxes.reserve(boxes->size());
  for (std::size_t i = 0; i < boxes->size(); ++i) {
    out.gt_boxes.push_back(
        box_from_json((*boxes)[i], "boxes[" + std::to_string(i) + "]", false));
  }
  auto labels = doc.find("point_labels");
  if (labels != doc.end()) {
    if (!labels->is_array()) {
      throw io_error("point_labels: expected an array");
    }
    std::vector<int> values;
    values.reserve(labels->size());
    for (std::size_t i = 0; i < labels->size(); ++i) {
      if (!(*labels)[i].is_number_integer()) {
        throw io_error("point_labels[" + std::to_string(i) +
                       "]: expected an integer");
      }
      values.push_back((*labels)[i].get<int>());
    }
    out.point_labels = std::move(values);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw io_error("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  const std::string text = read_file(path);
  return std::vector<std::uint8_t>(text.begin(), text.end());
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw io_error("cannot open " + path + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw io_error("write failed on " + path);
  }
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw io_error("cannot open " + path + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw io_error("write failed on " + path);
  }
}

PointCloud load_cloud(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0) {
    const auto bytes = read_file_bytes(path);
    return read_point_bin(bytes);
  }
  return read_ascii_xyz(read_file(path));
}

}  // namespace azinorm
