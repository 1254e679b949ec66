// Random small regression-head instances and their finite-difference checks.

#ifndef ACTUBE_TESTS_GRADIENT_CHECK_HPP_
#define ACTUBE_TESTS_GRADIENT_CHECK_HPP_

#include <span>
#include <vector>

#include "actube/grid_codec.hpp"
#include "actube/neural_head.hpp"
#include "actube/rng.hpp"
#include "oracles.hpp"

namespace actube::gradcheck {

inline constexpr double kStep = 1e-5;

struct Dims {
  int k = 1;
  int b = 1;
  int hidden = 1;
  int length = 1;
  int input = 1;
};

inline Dims random_dims(Rng& rng) {
  return Dims{rng.uniform_int(1, 3), rng.uniform_int(1, 2),
              rng.uniform_int(1, 8), rng.uniform_int(1, 4),
              rng.uniform_int(1, 6)};
}

// A prediction with sizes bounded away from zero so the square-root terms
// stay differentiable under the finite-difference step.
inline GridTensor random_prediction(const GridShape& s, Rng& rng) {
  GridTensor t(s);
  for (std::size_t cell = 0; cell < s.cells(); ++cell) {
    for (int j = 0; j < s.b; ++j) {
      t.at(cell, j, Slot::kX) = rng.uniform(-0.2, 1.2);
      t.at(cell, j, Slot::kY) = rng.uniform(-0.2, 1.2);
      t.at(cell, j, Slot::kW) = rng.uniform(0.05, 0.9);
      t.at(cell, j, Slot::kH) = rng.uniform(0.05, 0.9);
      t.at(cell, j, Slot::kConf) = rng.uniform(-0.5, 1.5);
    }
    t.ac(cell) = rng.uniform(-0.5, 1.5);
    t.bg(cell) = rng.uniform(-0.5, 1.5);
  }
  return t;
}

inline std::vector<Box2D> random_ground_truth(Rng& rng) {
  std::vector<Box2D> out;
  const int n = rng.uniform_int(0, 3);
  for (int i = 0; i < n; ++i) out.push_back(oracle::random_box(rng, 0.05, 0.6));
  return out;
}

inline FrameTarget random_target(const GridShape& s, Rng& rng) {
  const GridTensor reference = random_prediction(s, rng);
  return encode_target(random_ground_truth(rng), reference);
}

// Readout with small weights and a 0.5 bias on the size slots, so predicted
// sizes stay positive for bounded inputs.
inline DenseParams small_readout(std::size_t input, const GridShape& s,
                                 Rng& rng) {
  DenseParams d(input, s);
  const double scale = 0.4 / static_cast<double>(input);
  for (double& w : d.w.data) w = rng.uniform(-scale, scale);
  for (std::size_t cell = 0; cell < s.cells(); ++cell) {
    for (int j = 0; j < s.b; ++j) {
      const std::size_t base = cell * s.cell_stride() + static_cast<std::size_t>(j) * 5;
      d.b[base + 0] = rng.uniform(0.0, 1.0);
      d.b[base + 1] = rng.uniform(0.0, 1.0);
      d.b[base + 2] = 0.5;
      d.b[base + 3] = 0.5;
      d.b[base + 4] = rng.uniform(0.0, 1.0);
    }
    const std::size_t scores = cell * s.cell_stride() + static_cast<std::size_t>(s.b) * 5;
    d.b[scores] = rng.uniform(0.0, 1.0);
    d.b[scores + 1] = rng.uniform(0.0, 1.0);
  }
  return d;
}

inline std::vector<Vector> random_sequence(const Dims& d, Rng& rng) {
  std::vector<Vector> seq(static_cast<std::size_t>(d.length));
  for (Vector& x : seq) {
    x.resize(static_cast<std::size_t>(d.input));
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
  }
  return seq;
}

inline std::vector<FrameTarget> random_targets(const GridShape& s, int length,
                                               Rng& rng) {
  std::vector<FrameTarget> out;
  for (int t = 0; t < length; ++t) out.push_back(random_target(s, rng));
  return out;
}

inline Vector concat(const Vector& a, const Vector& b) {
  Vector out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Max relative error of loss_gradient against central differences of
// grid_loss over the prediction entries.
inline double check_loss_gradient(const GridShape& s, Rng& rng) {
  const LossWeights weights;
  const GridTensor pred = random_prediction(s, rng);
  const FrameTarget target = encode_target(random_ground_truth(rng), pred);
  const GridTensor analytic = loss_gradient(pred, target, weights);
  const Vector numeric = oracle::central_difference(
      [&](std::span<const double> v) {
        return grid_loss(GridTensor(s, Vector(v.begin(), v.end())), target,
                         weights)
            .total;
      },
      pred.values, kStep);
  return oracle::max_relative_error(analytic.values, numeric);
}

template <class Cell>
double check_bptt(const Cell& cell, const DenseParams& readout,
                  const std::vector<Vector>& seq,
                  const std::vector<FrameTarget>& targets) {
  const LossWeights weights;
  const auto g = bptt(cell, readout, seq, targets, weights);
  const Vector analytic = concat(flatten(g.cell), flatten(g.readout));
  const std::size_t n_cell = parameter_count(cell);
  const Vector x0 = concat(flatten(cell), flatten(readout));
  const Vector numeric = oracle::central_difference(
      [&](std::span<const double> v) {
        Cell c = cell;
        DenseParams r = readout;
        unflatten(v.subspan(0, n_cell), c);
        unflatten(v.subspan(n_cell), r);
        return sequence_loss(c, r, seq, targets, weights);
      },
      x0, kStep);
  return oracle::max_relative_error(analytic, numeric);
}

inline LstmParams random_lstm(const Dims& d, Modulation m, Rng& rng) {
  LstmParams p(static_cast<std::size_t>(d.input),
               static_cast<std::size_t>(d.hidden), m);
  init_uniform(p, rng);
  return p;
}

inline RnnParams random_rnn(const Dims& d, Rng& rng) {
  RnnParams p(static_cast<std::size_t>(d.input),
              static_cast<std::size_t>(d.hidden),
              static_cast<std::size_t>(d.hidden));
  init_uniform(p, rng);
  return p;
}

struct InstanceErrors {
  double loss = 0.0;
  double lstm = 0.0;
  double rnn = 0.0;
  double dense = 0.0;
};

// One random instance: the grid loss gradient, BPTT through an LSTM (either
// modulation), BPTT through a plain RNN and the static head.
inline InstanceErrors check_instance(Rng& rng) {
  const Dims d = random_dims(rng);
  const GridShape s{d.k, d.b};
  InstanceErrors e;
  e.loss = check_loss_gradient(s, rng);

  const std::vector<Vector> seq = random_sequence(d, rng);
  const std::vector<FrameTarget> targets = random_targets(s, d.length, rng);
  const Modulation m = rng.uniform() < 0.5 ? Modulation::kSigmoid : Modulation::kTanh;
  const auto hidden = static_cast<std::size_t>(d.hidden);
  e.lstm = check_bptt(random_lstm(d, m, rng), small_readout(hidden, s, rng), seq,
                      targets);
  e.rnn = check_bptt(random_rnn(d, rng), small_readout(hidden, s, rng), seq,
                     targets);

  const DenseParams head = small_readout(static_cast<std::size_t>(d.input), s, rng);
  const DenseGradients g = static_gradient(head, seq[0], targets[0], LossWeights{});
  const Vector numeric = oracle::central_difference(
      [&](std::span<const double> v) {
        DenseParams h = head;
        unflatten(v, h);
        return grid_loss(static_step(h, seq[0]), targets[0], LossWeights{}).total;
      },
      flatten(head), kStep);
  e.dense = oracle::max_relative_error(flatten(g.head), numeric);
  return e;
}

}  // namespace actube::gradcheck

#endif  // ACTUBE_TESTS_GRADIENT_CHECK_HPP_
