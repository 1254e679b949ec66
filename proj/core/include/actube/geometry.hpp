// Box geometry and the shared data model for detections, paths and
// ground-truth tubes.
//
// All coordinates are normalized to the image: (x, y) is the box center as a
// fraction of image width/height and (w, h) its size as a fraction of image
// width/height. Corner form is derived on demand.

#ifndef ACTUBE_GEOMETRY_HPP_
#define ACTUBE_GEOMETRY_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace actube {

struct Corners {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

// Normalized center-size box. Use Box2D::make() to build one from untrusted
// values: it rejects non-finite input and clamps every field into [0, 1].
struct Box2D {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  static Box2D make(double x, double y, double w, double h);

  // Corners clipped to the unit square.
  Corners corners() const;
  double area() const;

  friend bool operator==(const Box2D&, const Box2D&) = default;
};

// A detection box with its regressed confidence and the cell's
// actionness/background scores. `conf` is stored as regressed (unclamped).
struct ScoredBox {
  Box2D box;
  double conf = 0.0;
  double ac = 0.0;
  double bg = 0.0;

  friend bool operator==(const ScoredBox&, const ScoredBox&) = default;
};

struct FrameDetections {
  int frame_index = 0;
  std::vector<ScoredBox> boxes;

  friend bool operator==(const FrameDetections&,
                         const FrameDetections&) = default;
};

struct VideoDetections {
  std::string video_id;
  std::vector<FrameDetections> frames;

  std::size_t length() const { return frames.size(); }

  friend bool operator==(const VideoDetections&,
                         const VideoDetections&) = default;
};

// A frame-contiguous run of boxes covering frames [start, end] inclusive.
struct TubePath {
  int start = 0;
  int end = 0;
  std::vector<ScoredBox> boxes;

  int length() const { return end - start + 1; }
  const ScoredBox& at_frame(int frame) const {
    return boxes[static_cast<std::size_t>(frame - start)];
  }

  friend bool operator==(const TubePath&, const TubePath&) = default;
};

struct GroundTruthTube {
  int start = 0;
  int end = 0;
  std::vector<Box2D> boxes;
  std::string class_label;

  int length() const { return end - start + 1; }
  const Box2D& at_frame(int frame) const {
    return boxes[static_cast<std::size_t>(frame - start)];
  }

  friend bool operator==(const GroundTruthTube&,
                         const GroundTruthTube&) = default;
};

// Intersection over union of two boxes, computed on unit-square-clipped
// corners. Zero when the union area is zero.
double iou(const Box2D& a, const Box2D& b);

// Horizontal flip of the image: x -> 1 - x.
Box2D mirror_box(const Box2D& b);
ScoredBox mirror_box(const ScoredBox& b);

// Throw std::invalid_argument when the invariants of the type are violated.
void validate(const Box2D& b);
void validate(const ScoredBox& b);
void validate(const VideoDetections& v);
void validate(const TubePath& p);
void validate(const GroundTruthTube& g);

}  // namespace actube

#endif  // ACTUBE_GEOMETRY_HPP_
