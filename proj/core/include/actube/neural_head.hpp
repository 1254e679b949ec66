// Regression heads that map per-frame feature vectors to grid tensors:
// a plain recurrent cell, an LSTM cell, and a static fully-connected layer.
// Also the grid regression loss, its analytic gradient, backpropagation
// through time and the Adam optimizer.

#ifndef ACTUBE_NEURAL_HEAD_HPP_
#define ACTUBE_NEURAL_HEAD_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "actube/grid_codec.hpp"
#include "actube/rng.hpp"

namespace actube {

using Vector = std::vector<double>;

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// out += m * x
void gemv_acc(const Matrix& m, std::span<const double> x, std::span<double> out);
// out += m^T * y
void gemv_t_acc(const Matrix& m, std::span<const double> y,
                std::span<double> out);
// m += y * x^T
void outer_acc(std::span<const double> y, std::span<const double> x, Matrix& m);

double sigmoid(double v);

// ---------------------------------------------------------------------------
// Parameter sets. Each exposes visit(f) which calls f(name, span) for every
// array in its declared (serialization) order.

struct RnnParams {
  Matrix w_xh;  // H x D
  Matrix w_hh;  // H x H
  Vector b_h;   // H
  Matrix w_hz;  // O x H
  Vector b_z;   // O

  RnnParams() = default;
  RnnParams(std::size_t input_dim, std::size_t hidden_dim,
            std::size_t output_dim);

  std::size_t input_dim() const { return w_xh.cols; }
  std::size_t hidden_dim() const { return w_xh.rows; }
  std::size_t output_dim() const { return w_hz.rows; }

  template <class F>
  void visit(F&& f) {
    f("w_xh", std::span<double>(w_xh.data));
    f("w_hh", std::span<double>(w_hh.data));
    f("b_h", std::span<double>(b_h));
    f("w_hz", std::span<double>(w_hz.data));
    f("b_z", std::span<double>(b_z));
  }
  template <class F>
  void visit(F&& f) const {
    f("w_xh", std::span<const double>(w_xh.data));
    f("w_hh", std::span<const double>(w_hh.data));
    f("b_h", std::span<const double>(b_h));
    f("w_hz", std::span<const double>(w_hz.data));
    f("b_z", std::span<const double>(b_z));
  }

  friend bool operator==(const RnnParams&, const RnnParams&) = default;
};

// Activation applied to the LSTM input-modulation gate g. The logistic form
// is the default; kTanh selects the conventional LSTM cell.
enum class Modulation { kSigmoid, kTanh };

std::string_view to_string(Modulation m);
Modulation modulation_from_string(std::string_view s);

struct LstmParams {
  Matrix w_xi, w_xf, w_xo, w_xc;  // H x D
  Matrix w_hi, w_hf, w_ho, w_hc;  // H x H
  Vector b_i, b_f, b_o, b_c;      // H
  Modulation modulation = Modulation::kSigmoid;

  LstmParams() = default;
  LstmParams(std::size_t input_dim, std::size_t hidden_dim,
             Modulation m = Modulation::kSigmoid);

  std::size_t input_dim() const { return w_xi.cols; }
  std::size_t hidden_dim() const { return w_xi.rows; }

  template <class F>
  void visit(F&& f) {
    visit_impl<double>(*this, f);
  }
  template <class F>
  void visit(F&& f) const {
    visit_impl<const double>(*this, f);
  }

  friend bool operator==(const LstmParams&, const LstmParams&) = default;

 private:
  template <class T, class Self, class F>
  static void visit_impl(Self& self, F& f) {
    f("w_xi", std::span<T>(self.w_xi.data));
    f("w_xf", std::span<T>(self.w_xf.data));
    f("w_xo", std::span<T>(self.w_xo.data));
    f("w_xc", std::span<T>(self.w_xc.data));
    f("w_hi", std::span<T>(self.w_hi.data));
    f("w_hf", std::span<T>(self.w_hf.data));
    f("w_ho", std::span<T>(self.w_ho.data));
    f("w_hc", std::span<T>(self.w_hc.data));
    f("b_i", std::span<T>(self.b_i));
    f("b_f", std::span<T>(self.b_f));
    f("b_o", std::span<T>(self.b_o));
    f("b_c", std::span<T>(self.b_c));
  }
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t hidden_dim) {
    return LstmState{Vector(hidden_dim, 0.0), Vector(hidden_dim, 0.0)};
  }
};

// Linear map to a grid tensor; the static head and the readout of the
// recurrent heads.
struct DenseParams {
  GridShape grid;
  Matrix w;  // grid.size() x D
  Vector b;  // grid.size()

  DenseParams() = default;
  DenseParams(std::size_t input_dim, GridShape g);

  std::size_t input_dim() const { return w.cols; }

  template <class F>
  void visit(F&& f) {
    f("w", std::span<double>(w.data));
    f("b", std::span<double>(b));
  }
  template <class F>
  void visit(F&& f) const {
    f("w", std::span<const double>(w.data));
    f("b", std::span<const double>(b));
  }

  friend bool operator==(const DenseParams&, const DenseParams&) = default;
};

template <class P>
std::size_t parameter_count(const P& p) {
  std::size_t n = 0;
  p.visit([&](std::string_view, std::span<const double> a) { n += a.size(); });
  return n;
}

template <class P>
Vector flatten(const P& p) {
  Vector out;
  out.reserve(parameter_count(p));
  p.visit([&](std::string_view, std::span<const double> a) {
    out.insert(out.end(), a.begin(), a.end());
  });
  return out;
}

// Overwrite every array of `p` from `flat` (length parameter_count(p)).
template <class P>
void unflatten(std::span<const double> flat, P& p) {
  std::size_t at = 0;
  p.visit([&](std::string_view, std::span<double> a) {
    for (double& v : a) v = flat[at++];
  });
}

// Uniform in [-s, s] with s = 1/sqrt(fan-in) of the layer each array feeds.
void init_uniform(RnnParams& p, Rng& rng);
void init_uniform(LstmParams& p, Rng& rng);
void init_uniform(DenseParams& p, Rng& rng);

// ---------------------------------------------------------------------------
// Forward steps.

struct RnnStepResult {
  Vector h;
  Vector z;
};

RnnStepResult rnn_step(const RnnParams& p, std::span<const double> x,
                       std::span<const double> h_prev);

struct LstmStepResult {
  LstmState state;
  Vector i, f, o, g;  // gate activations
  Vector tanh_c;

  const Vector& output() const { return state.h; }
};

LstmStepResult lstm_step(const LstmParams& p, std::span<const double> x,
                         const LstmState& prev);

GridTensor static_step(const DenseParams& p, std::span<const double> x);

// ---------------------------------------------------------------------------
// Loss.

struct LossWeights {
  double lambda_coord = 5.0;
  double lambda_noobj = 0.5;
};

void validate(const LossWeights& w);

struct LossTerms {
  // coordinates, sizes, responsible confidence, non-responsible confidence,
  // cell scores
  std::array<double, 5> terms{};
  double total = 0.0;
};

LossTerms grid_loss(const GridTensor& pred, const FrameTarget& target,
                    const LossWeights& weights);

// d(grid_loss.total)/d(pred), same layout as pred.
GridTensor loss_gradient(const GridTensor& pred, const FrameTarget& target,
                         const LossWeights& weights);

// ---------------------------------------------------------------------------
// Backpropagation through time. The recurrent state starts at zero; each
// step's cell output is mapped to a grid tensor by `readout`.

struct LstmGradients {
  LstmParams cell;
  DenseParams readout;
  double loss = 0.0;
};

struct RnnGradients {
  RnnParams cell;
  DenseParams readout;
  double loss = 0.0;
};

struct DenseGradients {
  DenseParams head;
  double loss = 0.0;
};

// Sum of per-frame losses over a sequence and its parameter gradients.
LstmGradients bptt(const LstmParams& cell, const DenseParams& readout,
                   std::span<const Vector> sequence,
                   std::span<const FrameTarget> targets,
                   const LossWeights& weights);

RnnGradients bptt(const RnnParams& cell, const DenseParams& readout,
                  std::span<const Vector> sequence,
                  std::span<const FrameTarget> targets,
                  const LossWeights& weights);

// Forward-only counterparts returning the summed loss.
double sequence_loss(const LstmParams& cell, const DenseParams& readout,
                     std::span<const Vector> sequence,
                     std::span<const FrameTarget> targets,
                     const LossWeights& weights);
double sequence_loss(const RnnParams& cell, const DenseParams& readout,
                     std::span<const Vector> sequence,
                     std::span<const FrameTarget> targets,
                     const LossWeights& weights);

// Per-frame grid predictions of a recurrent head over a sequence.
std::vector<GridTensor> predict_sequence(const LstmParams& cell,
                                         const DenseParams& readout,
                                         std::span<const Vector> sequence);

// Gradient of one frame's loss for the static head.
DenseGradients static_gradient(const DenseParams& head,
                               std::span<const double> x,
                               const FrameTarget& target,
                               const LossWeights& weights);

// ---------------------------------------------------------------------------
// Adam.

struct AdamState {
  Vector m;
  Vector v;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr = 1e-4;

  static AdamState for_size(std::size_t n, double lr = 1e-4) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    s.lr = lr;
    return s;
  }
};

void validate(const AdamState& s);

struct AdamResult {
  Vector params;
  AdamState state;
};

AdamResult adam_update(const AdamState& state, std::span<const double> params,
                       std::span<const double> grads);

// In-place variant used by training loops that own their buffers.
void adam_update_inplace(AdamState& state, std::span<double> params,
                         std::span<const double> grads);

// Step-decay schedule: `initial` until `decay_epoch` (exclusive), then
// `decayed`.
double learning_rate_at(int epoch, double initial, double decayed,
                        int decay_epoch);

}  // namespace actube

#endif  // ACTUBE_NEURAL_HEAD_HPP_
