#include "actube/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace actube {
namespace {

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

Box2D Box2D::make(double x, double y, double w, double h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) ||
      !std::isfinite(h)) {
    throw std::invalid_argument("Box2D: non-finite coordinate");
  }
  return Box2D{clamp_unit(x), clamp_unit(y), clamp_unit(w), clamp_unit(h)};
}

Corners Box2D::corners() const {
  return Corners{clamp_unit(x - 0.5 * w), clamp_unit(y - 0.5 * h),
                 clamp_unit(x + 0.5 * w), clamp_unit(y + 0.5 * h)};
}

double Box2D::area() const {
  const Corners c = corners();
  return (c.x1 - c.x0) * (c.y1 - c.y0);
}

double iou(const Box2D& a, const Box2D& b) {
  const Corners ca = a.corners();
  const Corners cb = b.corners();
  const double iw = std::min(ca.x1, cb.x1) - std::max(ca.x0, cb.x0);
  const double ih = std::min(ca.y1, cb.y1) - std::max(ca.y0, cb.y0);
  const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Box2D mirror_box(const Box2D& b) { return Box2D{1.0 - b.x, b.y, b.w, b.h}; }

ScoredBox mirror_box(const ScoredBox& b) {
  ScoredBox out = b;
  out.box = mirror_box(b.box);
  return out;
}

void validate(const Box2D& b) {
  if (!in_unit(b.x) || !in_unit(b.y) || !in_unit(b.w) || !in_unit(b.h)) {
    throw std::invalid_argument("Box2D: fields must be finite and in [0, 1]");
  }
}

void validate(const ScoredBox& b) {
  validate(b.box);
  if (!std::isfinite(b.conf) || !std::isfinite(b.ac) || !std::isfinite(b.bg)) {
    throw std::invalid_argument("ScoredBox: non-finite score");
  }
}

void validate(const VideoDetections& v) {
  if (v.frames.empty()) {
    throw std::invalid_argument("VideoDetections '" + v.video_id +
                                "': no frames");
  }
  for (std::size_t t = 0; t < v.frames.size(); ++t) {
    if (v.frames[t].frame_index != static_cast<int>(t)) {
      throw std::invalid_argument("VideoDetections '" + v.video_id +
                                  "': frame indices must be 0..T-1, got " +
                                  std::to_string(v.frames[t].frame_index) +
                                  " at position " + std::to_string(t));
    }
    for (const ScoredBox& b : v.frames[t].boxes) validate(b);
  }
}

void validate(const TubePath& p) {
  if (p.start < 0 || p.start > p.end) {
    throw std::invalid_argument("TubePath: require 0 <= start <= end");
  }
  if (p.boxes.size() != static_cast<std::size_t>(p.length())) {
    throw std::invalid_argument("TubePath: box count must equal end-start+1");
  }
  for (const ScoredBox& b : p.boxes) validate(b);
}

void validate(const GroundTruthTube& g) {
  if (g.start < 0 || g.start > g.end) {
    throw std::invalid_argument("GroundTruthTube: require 0 <= start <= end");
  }
  if (g.boxes.size() != static_cast<std::size_t>(g.length())) {
    throw std::invalid_argument(
        "GroundTruthTube: box count must equal end-start+1");
  }
  for (const Box2D& b : g.boxes) validate(b);
}

}  // namespace actube
