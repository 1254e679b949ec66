// Hand-built inputs shared by the unit and acceptance tests.

#ifndef ACTUBE_TESTS_FIXTURES_HPP_
#define ACTUBE_TESTS_FIXTURES_HPP_

#include "actube/grid_codec.hpp"

namespace actube::fixtures {

// Single-object-cell loss example: K=7, B=2,
// object in cell 24.
struct LossExample {
  GridTensor pred;
  FrameTarget target;
};

inline LossExample make_loss_example() {
  const GridShape s{7, 2};
  LossExample ex{GridTensor(s), empty_target(s)};
  const std::size_t cell = 24;
  ex.pred.at(cell, 0, Slot::kX) = 0.5;
  ex.pred.at(cell, 0, Slot::kY) = 0.5;
  ex.pred.at(cell, 0, Slot::kW) = 0.25;
  ex.pred.at(cell, 0, Slot::kH) = 0.25;
  ex.pred.at(cell, 0, Slot::kConf) = 0.8;
  ex.pred.at(cell, 1, Slot::kConf) = 0.3;
  ex.pred.ac(cell) = 0.7;
  ex.pred.bg(cell) = 0.2;

  GridTensor& t = ex.target.target;
  t.at(cell, 0, Slot::kX) = 0.6;
  t.at(cell, 0, Slot::kY) = 0.5;
  t.at(cell, 0, Slot::kW) = 0.16;
  t.at(cell, 0, Slot::kH) = 0.25;
  t.at(cell, 0, Slot::kConf) = 1.0;
  t.ac(cell) = 1.0;
  t.bg(cell) = 0.0;
  ResponsibilityMask& m = ex.target.mask;
  m.cell_has_object[cell] = true;
  m.responsible[cell * 2] = true;
  m.not_responsible[cell * 2] = false;
  return ex;
}

}  // namespace actube::fixtures

#endif  // ACTUBE_TESTS_FIXTURES_HPP_
