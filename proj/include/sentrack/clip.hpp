#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace sentrack {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned box in image coordinates (x right, y down, origin top-left).
struct BBox {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  Vec2 center() const { return {0.5 * (x1 + x2), 0.5 * (y1 + y2)}; }
  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  BBox shifted(const Vec2& d) const { return {x1 + d.x(), y1 + d.y(), x2 + d.x(), y2 + d.y()}; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

double iou(const BBox& a, const BBox& b);

/// One detector output b^t_j. `flow` is the average optical flow inside the
/// box in math convention (positive y points up), pixels per frame.
struct Detection {
  BBox box;
  double raw_score = 0;
  std::string class_label;
  Vec2 flow = Vec2::Zero();
  double hue = 0;  // degrees, [0, 360)

  bool operator==(const Detection& o) const {
    return box == o.box && raw_score == o.raw_score && class_label == o.class_label &&
           flow == o.flow && hue == o.hue;
  }
};

struct Frame {
  int index = 1;  // 1-based
  std::vector<Detection> detections;

  bool operator==(const Frame&) const = default;
};

/// The detection set B for one video clip. Immutable once loaded.
struct Clip {
  std::string id;
  double frame_rate = 30.0;
  std::vector<Frame> frames;

  std::size_t num_frames() const { return frames.size(); }
  bool operator==(const Clip&) const = default;
};

/// One detection index per frame, 1-based (j^t in [1, J^t]).
struct Track {
  std::string clip_id;
  std::vector<int> indices;

  bool operator==(const Track&) const = default;
};

/// Collects every invariant breach; empty result means the clip is valid.
std::vector<std::string> validate_clip(const Clip& clip);

Clip parse_clip(const std::string& text);
std::string serialize_clip(const Clip& clip);
Clip load_clip(const std::filesystem::path& path);
void save_clip(const Clip& clip, const std::filesystem::path& path);

/// Keeps the k highest-scoring detections in each frame, preserving their
/// original relative order. Equal scores keep the earlier detection.
Clip prune_top_k(const Clip& clip, int k);
/// 0-based indices of the detections prune_top_k keeps in a frame, ascending.
std::vector<int> top_k_indices(const Frame& frame, int k);

/// Materializes b^t_{j^t} for every frame, in frame order.
std::vector<std::pair<int, Detection>> track_boxes(const Clip& clip, const Track& track);

}  // namespace sentrack
