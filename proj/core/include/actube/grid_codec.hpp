// K x K x (B*5 + 2) grid tensors: decoding to frame boxes and building
// training targets with responsibility masks.
//
// Cell layout (row-major cells, cell = row * K + col):
//   [x, y, w, h, c] for predictor 0 .. B-1, then (s_ac, s_bg).
// x, y are relative to the cell bounds; w, h are relative to the image.

#ifndef ACTUBE_GRID_CODEC_HPP_
#define ACTUBE_GRID_CODEC_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

struct GridShape {
  int k = 7;
  int b = 2;

  std::size_t cell_stride() const { return static_cast<std::size_t>(b) * 5 + 2; }
  std::size_t cells() const { return static_cast<std::size_t>(k) * k; }
  std::size_t size() const { return cells() * cell_stride(); }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

void validate(const GridShape& s);

enum class Slot : std::size_t { kX = 0, kY = 1, kW = 2, kH = 3, kConf = 4 };

struct GridTensor {
  GridShape shape;
  std::vector<double> values;

  GridTensor() = default;
  explicit GridTensor(GridShape s);
  GridTensor(GridShape s, std::vector<double> v);

  std::size_t box_offset(std::size_t cell, int predictor) const {
    return cell * shape.cell_stride() + static_cast<std::size_t>(predictor) * 5;
  }
  std::size_t score_offset(std::size_t cell) const {
    return cell * shape.cell_stride() + static_cast<std::size_t>(shape.b) * 5;
  }

  double& at(std::size_t cell, int predictor, Slot s) {
    return values[box_offset(cell, predictor) + static_cast<std::size_t>(s)];
  }
  double at(std::size_t cell, int predictor, Slot s) const {
    return values[box_offset(cell, predictor) + static_cast<std::size_t>(s)];
  }
  double& ac(std::size_t cell) { return values[score_offset(cell)]; }
  double ac(std::size_t cell) const { return values[score_offset(cell)]; }
  double& bg(std::size_t cell) { return values[score_offset(cell) + 1]; }
  double bg(std::size_t cell) const { return values[score_offset(cell) + 1]; }

  friend bool operator==(const GridTensor&, const GridTensor&) = default;
};

// Throws std::invalid_argument when the value count disagrees with the shape
// or an entry is non-finite.
void validate(const GridTensor& t);

struct ResponsibilityMask {
  GridShape shape;
  std::vector<bool> cell_has_object;  // K*K
  std::vector<bool> responsible;      // K*K*B
  std::vector<bool> not_responsible;  // K*K*B

  bool is_responsible(std::size_t cell, int j) const {
    return responsible[cell * static_cast<std::size_t>(shape.b) +
                       static_cast<std::size_t>(j)];
  }
  bool is_not_responsible(std::size_t cell, int j) const {
    return not_responsible[cell * static_cast<std::size_t>(shape.b) +
                           static_cast<std::size_t>(j)];
  }
};

struct FrameTarget {
  GridTensor target;
  ResponsibilityMask mask;
  // Indices (into the gt list) of boxes discarded because another, larger
  // box already claimed the same cell.
  std::vector<std::size_t> dropped;
};

// Image-space box of predictor j in `cell`. w, h are clamped into [0, 1].
Box2D decode_predictor(const GridTensor& t, std::size_t cell, int predictor);

// All K*K*B boxes in cell-major, predictor-minor order, unthresholded.
FrameDetections decode(const GridTensor& t, int frame_index = 0);

// Cell (row, col) containing an image-space point; the boundary value 1.0
// maps to K-1.
std::size_t cell_of(const GridShape& s, double x, double y);

FrameTarget encode_target(std::span<const Box2D> gt_boxes,
                          const GridTensor& pred);

// Mask and target for a frame without ground truth.
FrameTarget empty_target(const GridShape& s);

}  // namespace actube

#endif  // ACTUBE_GRID_CODEC_HPP_
