#include "sentrack/clip.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sentrack/error.hpp"

namespace sentrack {

using nlohmann::json;

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.width() * a.height() + b.width() * b.height() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

std::vector<std::string> validate_clip(const Clip& clip) {
  std::vector<std::string> issues;
  if (clip.frames.empty()) issues.push_back("clip has no frames");
  for (std::size_t f = 0; f < clip.frames.size(); ++f) {
    const Frame& frame = clip.frames[f];
    if (frame.index != static_cast<int>(f) + 1) {
      issues.push_back("non-consecutive frame index " + std::to_string(frame.index));
    }
    for (std::size_t j = 0; j < frame.detections.size(); ++j) {
      const Detection& d = frame.detections[j];
      const std::string where =
          "frame " + std::to_string(frame.index) + " detection " + std::to_string(j + 1);
      const BBox& b = d.box;
      if (!(std::isfinite(b.x1) && std::isfinite(b.y1) && std::isfinite(b.x2) &&
            std::isfinite(b.y2))) {
        issues.push_back(where + ": box not finite");
      } else if (!(b.x1 < b.x2 && b.y1 < b.y2)) {
        issues.push_back(where + ": box requires x1 < x2 and y1 < y2");
      }
      if (!std::isfinite(d.raw_score)) issues.push_back(where + ": score not finite");
      if (!d.flow.allFinite()) issues.push_back(where + ": flow not finite");
      if (!(d.hue >= 0.0 && d.hue < 360.0)) issues.push_back(where + ": hue outside [0,360)");
      if (d.class_label.empty()) issues.push_back(where + ": empty class");
    }
  }
  return issues;
}

namespace {

// Line number of a byte offset in `text`, 1-based.
std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

const json& need(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError("field " + path + ": expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("field " + path + "." + key + ": missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError("field " + path + ": expected number");
  return v.get<double>();
}

template <std::size_t N>
std::array<double, N> numbers(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N) {
    throw ParseError("field " + path + ": expected array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Detection detection_from_json(const json& d, const std::string& path) {
  Detection det;
  const auto box = numbers<4>(need(d, "box", path), path + ".box");
  det.box = {box[0], box[1], box[2], box[3]};
  det.raw_score = number(need(d, "score", path), path + ".score");
  const json& cls = need(d, "class", path);
  if (!cls.is_string()) throw ParseError("field " + path + ".class: expected string");
  det.class_label = cls.get<std::string>();
  const auto flow = numbers<2>(need(d, "flow", path), path + ".flow");
  det.flow = {flow[0], flow[1]};
  det.hue = number(need(d, "hue", path), path + ".hue");
  return det;
}

}  // namespace

Clip parse_clip(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  Clip clip;
  const json& id = need(doc, "id", "clip");
  if (!id.is_string()) throw ParseError("field clip.id: expected string");
  clip.id = id.get<std::string>();
  if (doc.contains("frame_rate")) clip.frame_rate = number(doc["frame_rate"], "clip.frame_rate");
  const json& frames = need(doc, "frames", "clip");
  if (!frames.is_array()) throw ParseError("field clip.frames: expected array");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string path = "clip.frames[" + std::to_string(f) + "]";
    Frame frame;
    const json& idx = need(frames[f], "index", path);
    if (!idx.is_number_integer()) throw ParseError("field " + path + ".index: expected integer");
    frame.index = idx.get<int>();
    const json& dets = need(frames[f], "detections", path);
    if (!dets.is_array()) throw ParseError("field " + path + ".detections: expected array");
    for (std::size_t j = 0; j < dets.size(); ++j) {
      frame.detections.push_back(
          detection_from_json(dets[j], path + ".detections[" + std::to_string(j) + "]"));
    }
    clip.frames.push_back(std::move(frame));
  }
  std::stable_sort(clip.frames.begin(), clip.frames.end(),
                   [](const Frame& a, const Frame& b) { return a.index < b.index; });
  if (auto issues = validate_clip(clip); !issues.empty()) {
    std::ostringstream msg;
    msg << "invalid clip '" << clip.id << "':";
    for (const auto& s : issues) msg << "\n  " << s;
    throw ValidationError(msg.str());
  }
  return clip;
}

std::string serialize_clip(const Clip& clip) {
  json frames = json::array();
  for (const Frame& frame : clip.frames) {
    json dets = json::array();
    for (const Detection& d : frame.detections) {
      dets.push_back({{"box", {d.box.x1, d.box.y1, d.box.x2, d.box.y2}},
                      {"score", d.raw_score},
                      {"class", d.class_label},
                      {"flow", {d.flow.x(), d.flow.y()}},
                      {"hue", d.hue}});
    }
    frames.push_back({{"index", frame.index}, {"detections", std::move(dets)}});
  }
  json doc = {{"id", clip.id}, {"frame_rate", clip.frame_rate}, {"frames", std::move(frames)}};
  return doc.dump(1) + "\n";
}

Clip load_clip(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open clip file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_clip(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_clip(const Clip& clip, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write clip file " + path.string());
  out << serialize_clip(clip);
}

std::vector<int> top_k_indices(const Frame& frame, int k) {
  if (k < 1) throw ValidationError("prune_top_k requires k >= 1");
  const auto& dets = frame.detections;
  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  if (static_cast<int>(dets.size()) <= k) return order;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dets[static_cast<std::size_t>(a)].raw_score > dets[static_cast<std::size_t>(b)].raw_score;
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

Clip prune_top_k(const Clip& clip, int k) {
  if (k < 1) throw ValidationError("prune_top_k requires k >= 1");
  Clip out = clip;
  for (Frame& frame : out.frames) {
    std::vector<Detection> kept;
    for (int i : top_k_indices(frame, k)) kept.push_back(frame.detections[static_cast<std::size_t>(i)]);
    frame.detections = std::move(kept);
  }
  return out;
}

std::vector<std::pair<int, Detection>> track_boxes(const Clip& clip, const Track& track) {
  if (track.indices.size() != clip.frames.size()) {
    throw ValidationError("track length " + std::to_string(track.indices.size()) +
                          " does not match clip length " + std::to_string(clip.frames.size()));
  }
  std::vector<std::pair<int, Detection>> out;
  out.reserve(clip.frames.size());
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    const Frame& frame = clip.frames[t];
    const int j = track.indices[t];
    if (j < 1 || j > static_cast<int>(frame.detections.size())) {
      throw ValidationError("track index " + std::to_string(j) + " out of range at frame " +
                            std::to_string(frame.index));
    }
    out.emplace_back(frame.index, frame.detections[static_cast<std::size_t>(j - 1)]);
  }
  return out;
}

}  // namespace sentrack
