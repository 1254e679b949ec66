#include "actube/grid_codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace actube {

void validate(const GridShape& s) {
  if (s.k < 1 || s.b < 1) {
    throw std::invalid_argument("GridShape: require k >= 1 and b >= 1");
  }
}

GridTensor::GridTensor(GridShape s) : shape(s) {
  validate(shape);
  values.assign(shape.size(), 0.0);
}

GridTensor::GridTensor(GridShape s, std::vector<double> v)
    : shape(s), values(std::move(v)) {
  validate(*this);
}

void validate(const GridTensor& t) {
  validate(t.shape);
  if (t.values.size() != t.shape.size()) {
    throw std::invalid_argument(
        "GridTensor: shape K=" + std::to_string(t.shape.k) +
        ", B=" + std::to_string(t.shape.b) + " needs " +
        std::to_string(t.shape.size()) + " values, got " +
        std::to_string(t.values.size()));
  }
  for (double v : t.values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("GridTensor: non-finite entry");
    }
  }
}

Box2D decode_predictor(const GridTensor& t, std::size_t cell, int predictor) {
  const auto k = static_cast<std::size_t>(t.shape.k);
  const double row = static_cast<double>(cell / k);
  const double col = static_cast<double>(cell % k);
  const double kd = static_cast<double>(t.shape.k);
  return Box2D::make((col + t.at(cell, predictor, Slot::kX)) / kd,
                     (row + t.at(cell, predictor, Slot::kY)) / kd,
                     t.at(cell, predictor, Slot::kW),
                     t.at(cell, predictor, Slot::kH));
}

FrameDetections decode(const GridTensor& t, int frame_index) {
  validate(t);
  FrameDetections out;
  out.frame_index = frame_index;
  out.boxes.reserve(t.shape.cells() * static_cast<std::size_t>(t.shape.b));
  for (std::size_t cell = 0; cell < t.shape.cells(); ++cell) {
    for (int j = 0; j < t.shape.b; ++j) {
      out.boxes.push_back(ScoredBox{decode_predictor(t, cell, j),
                                    t.at(cell, j, Slot::kConf), t.ac(cell),
                                    t.bg(cell)});
    }
  }
  return out;
}

std::size_t cell_of(const GridShape& s, double x, double y) {
  const auto index = [&](double v) {
    const auto i = static_cast<int>(std::floor(v * s.k));
    return static_cast<std::size_t>(std::clamp(i, 0, s.k - 1));
  };
  return index(y) * static_cast<std::size_t>(s.k) + index(x);
}

FrameTarget empty_target(const GridShape& s) {
  FrameTarget out;
  out.target = GridTensor(s);
  out.mask.shape = s;
  out.mask.cell_has_object.assign(s.cells(), false);
  out.mask.responsible.assign(s.cells() * static_cast<std::size_t>(s.b), false);
  out.mask.not_responsible.assign(s.cells() * static_cast<std::size_t>(s.b),
                                  true);
  return out;
}

FrameTarget encode_target(std::span<const Box2D> gt_boxes,
                          const GridTensor& pred) {
  validate(pred);
  const GridShape& s = pred.shape;
  FrameTarget out = empty_target(s);

  // Winner per cell; on collision the larger box stays.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(s.cells(), kNone);
  for (std::size_t g = 0; g < gt_boxes.size(); ++g) {
    validate(gt_boxes[g]);
    if (!(gt_boxes[g].w > 0.0 && gt_boxes[g].h > 0.0)) {
      throw std::invalid_argument("encode_target: ground-truth box " +
                                  std::to_string(g) + " has zero area");
    }
    const std::size_t cell = cell_of(s, gt_boxes[g].x, gt_boxes[g].y);
    if (owner[cell] == kNone) {
      owner[cell] = g;
    } else if (gt_boxes[g].area() > gt_boxes[owner[cell]].area()) {
      out.dropped.push_back(owner[cell]);
      owner[cell] = g;
    } else {
      out.dropped.push_back(g);
    }
  }
  std::sort(out.dropped.begin(), out.dropped.end());

  const double kd = static_cast<double>(s.k);
  const auto b = static_cast<std::size_t>(s.b);
  for (std::size_t cell = 0; cell < s.cells(); ++cell) {
    if (owner[cell] == kNone) continue;
    const Box2D& gt = gt_boxes[owner[cell]];
    const double row = static_cast<double>(cell / static_cast<std::size_t>(s.k));
    const double col = static_cast<double>(cell % static_cast<std::size_t>(s.k));

    int best = 0;
    double best_iou = -1.0;
    for (int j = 0; j < s.b; ++j) {
      const double v = iou(decode_predictor(pred, cell, j), gt);
      if (v > best_iou) {
        best_iou = v;
        best = j;
      }
    }

    out.mask.cell_has_object[cell] = true;
    out.mask.responsible[cell * b + static_cast<std::size_t>(best)] = true;
    out.mask.not_responsible[cell * b + static_cast<std::size_t>(best)] = false;

    GridTensor& t = out.target;
    t.at(cell, best, Slot::kX) = gt.x * kd - col;
    t.at(cell, best, Slot::kY) = gt.y * kd - row;
    t.at(cell, best, Slot::kW) = gt.w;
    t.at(cell, best, Slot::kH) = gt.h;
    t.at(cell, best, Slot::kConf) = 1.0;
    t.ac(cell) = 1.0;
    t.bg(cell) = 0.0;
  }
  return out;
}

}  // namespace actube
