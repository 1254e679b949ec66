#include "actube/neural_head.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace actube {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void fill_uniform(std::span<double> a, double s, Rng& rng) {
  for (double& v : a) v = rng.uniform(-s, s);
}

double fan_in_scale(std::size_t fan_in) {
  return 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
}

Vector affine(const Matrix& w, std::span<const double> x, const Vector& b) {
  Vector out = b;
  gemv_acc(w, x, out);
  return out;
}

double sqrt_clamped(double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }

void check_loss_inputs(const GridTensor& pred, const FrameTarget& target) {
  validate(pred);
  if (!(pred.shape == target.target.shape) ||
      target.target.values.size() != pred.values.size() ||
      target.mask.cell_has_object.size() != pred.shape.cells() ||
      target.mask.responsible.size() !=
          pred.shape.cells() * static_cast<std::size_t>(pred.shape.b) ||
      target.mask.not_responsible.size() != target.mask.responsible.size()) {
    throw std::invalid_argument("grid loss: prediction/target shape mismatch");
  }
}

void check_sequence(std::size_t input_dim, std::span<const Vector> sequence,
                    std::span<const FrameTarget> targets,
                    const DenseParams& readout, std::size_t cell_out) {
  require(!sequence.empty(), "bptt: empty sequence");
  require(sequence.size() == targets.size(),
          "bptt: sequence and target lengths differ");
  require(readout.input_dim() == cell_out,
          "bptt: readout input size does not match cell output");
  for (const Vector& x : sequence) {
    require(x.size() == input_dim, "bptt: feature vector size mismatch");
  }
}

GridTensor readout_forward(const DenseParams& readout,
                           std::span<const double> h) {
  return static_step(readout, h);
}

// Readout backward: accumulates readout grads and returns d(loss)/d(h).
Vector readout_backward(const DenseParams& readout, std::span<const double> h,
                        const GridTensor& dpred, DenseParams& grad) {
  outer_acc(dpred.values, h, grad.w);
  for (std::size_t k = 0; k < grad.b.size(); ++k) grad.b[k] += dpred.values[k];
  Vector dh(h.size(), 0.0);
  gemv_t_acc(readout.w, dpred.values, dh);
  return dh;
}

}  // namespace

void gemv_acc(const Matrix& m, std::span<const double> x,
              std::span<double> out) {
  require(x.size() == m.cols && out.size() == m.rows,
          "gemv: dimension mismatch");
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double* row = m.data.data() + r * m.cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * x[c];
    out[r] += acc;
  }
}

void gemv_t_acc(const Matrix& m, std::span<const double> y,
                std::span<double> out) {
  require(y.size() == m.rows && out.size() == m.cols,
          "gemv_t: dimension mismatch");
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    const double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * yr;
  }
}

void outer_acc(std::span<const double> y, std::span<const double> x,
               Matrix& m) {
  require(y.size() == m.rows && x.size() == m.cols,
          "outer: dimension mismatch");
  for (std::size_t r = 0; r < m.rows; ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    double* row = m.data.data() + r * m.cols;
    for (std::size_t c = 0; c < m.cols; ++c) row[c] += yr * x[c];
  }
}

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

RnnParams::RnnParams(std::size_t input_dim, std::size_t hidden_dim,
                     std::size_t output_dim)
    : w_xh(hidden_dim, input_dim),
      w_hh(hidden_dim, hidden_dim),
      b_h(hidden_dim, 0.0),
      w_hz(output_dim, hidden_dim),
      b_z(output_dim, 0.0) {}

std::string_view to_string(Modulation m) {
  return m == Modulation::kSigmoid ? "sigmoid" : "tanh";
}

Modulation modulation_from_string(std::string_view s) {
  if (s == "sigmoid") return Modulation::kSigmoid;
  if (s == "tanh") return Modulation::kTanh;
  throw std::invalid_argument("unknown modulation '" + std::string(s) + "'");
}

LstmParams::LstmParams(std::size_t input_dim, std::size_t hidden_dim,
                       Modulation m)
    : w_xi(hidden_dim, input_dim),
      w_xf(hidden_dim, input_dim),
      w_xo(hidden_dim, input_dim),
      w_xc(hidden_dim, input_dim),
      w_hi(hidden_dim, hidden_dim),
      w_hf(hidden_dim, hidden_dim),
      w_ho(hidden_dim, hidden_dim),
      w_hc(hidden_dim, hidden_dim),
      b_i(hidden_dim, 0.0),
      b_f(hidden_dim, 0.0),
      b_o(hidden_dim, 0.0),
      b_c(hidden_dim, 0.0),
      modulation(m) {}

DenseParams::DenseParams(std::size_t input_dim, GridShape g)
    : grid(g), w(g.size(), input_dim), b(g.size(), 0.0) {
  validate(g);
}

void init_uniform(RnnParams& p, Rng& rng) {
  const double sh = fan_in_scale(p.input_dim() + p.hidden_dim());
  const double sz = fan_in_scale(p.hidden_dim());
  fill_uniform(p.w_xh.data, sh, rng);
  fill_uniform(p.w_hh.data, sh, rng);
  fill_uniform(p.b_h, sh, rng);
  fill_uniform(p.w_hz.data, sz, rng);
  fill_uniform(p.b_z, sz, rng);
}

void init_uniform(LstmParams& p, Rng& rng) {
  const double s = fan_in_scale(p.input_dim() + p.hidden_dim());
  p.visit([&](std::string_view, std::span<double> a) { fill_uniform(a, s, rng); });
}

void init_uniform(DenseParams& p, Rng& rng) {
  const double s = fan_in_scale(p.input_dim());
  p.visit([&](std::string_view, std::span<double> a) { fill_uniform(a, s, rng); });
}

RnnStepResult rnn_step(const RnnParams& p, std::span<const double> x,
                       std::span<const double> h_prev) {
  require(x.size() == p.input_dim(), "rnn_step: input size mismatch");
  require(h_prev.size() == p.hidden_dim(), "rnn_step: hidden size mismatch");
  require(p.w_hh.rows == p.hidden_dim() && p.w_hh.cols == p.hidden_dim() &&
              p.b_h.size() == p.hidden_dim() &&
              p.w_hz.cols == p.hidden_dim() && p.b_z.size() == p.w_hz.rows,
          "rnn_step: inconsistent parameter shapes");
  RnnStepResult out;
  out.h = affine(p.w_xh, x, p.b_h);
  gemv_acc(p.w_hh, h_prev, out.h);
  for (double& v : out.h) v = sigmoid(v);
  out.z = affine(p.w_hz, out.h, p.b_z);
  for (double& v : out.z) v = sigmoid(v);
  return out;
}

LstmStepResult lstm_step(const LstmParams& p, std::span<const double> x,
                         const LstmState& prev) {
  const std::size_t hdim = p.hidden_dim();
  require(x.size() == p.input_dim(), "lstm_step: input size mismatch");
  require(prev.h.size() == hdim && prev.c.size() == hdim,
          "lstm_step: state size mismatch");
  require(p.b_i.size() == hdim && p.b_f.size() == hdim && p.b_o.size() == hdim &&
              p.b_c.size() == hdim && p.w_hi.cols == hdim &&
              p.w_hf.cols == hdim && p.w_ho.cols == hdim && p.w_hc.cols == hdim,
          "lstm_step: inconsistent parameter shapes");

  const auto gate = [&](const Matrix& wx, const Matrix& wh, const Vector& b) {
    Vector a = affine(wx, x, b);
    gemv_acc(wh, prev.h, a);
    return a;
  };

  LstmStepResult r;
  r.i = gate(p.w_xi, p.w_hi, p.b_i);
  r.f = gate(p.w_xf, p.w_hf, p.b_f);
  r.o = gate(p.w_xo, p.w_ho, p.b_o);
  r.g = gate(p.w_xc, p.w_hc, p.b_c);
  for (std::size_t k = 0; k < hdim; ++k) {
    r.i[k] = sigmoid(r.i[k]);
    r.f[k] = sigmoid(r.f[k]);
    r.o[k] = sigmoid(r.o[k]);
    r.g[k] = p.modulation == Modulation::kSigmoid ? sigmoid(r.g[k])
                                                  : std::tanh(r.g[k]);
  }
  r.state.c.resize(hdim);
  r.state.h.resize(hdim);
  r.tanh_c.resize(hdim);
  for (std::size_t k = 0; k < hdim; ++k) {
    r.state.c[k] = r.f[k] * prev.c[k] + r.i[k] * r.g[k];
    r.tanh_c[k] = std::tanh(r.state.c[k]);
    r.state.h[k] = r.o[k] * r.tanh_c[k];
  }
  return r;
}

GridTensor static_step(const DenseParams& p, std::span<const double> x) {
  require(x.size() == p.input_dim(), "static_step: input size mismatch");
  require(p.w.rows == p.grid.size() && p.b.size() == p.grid.size(),
          "static_step: output size must be K*K*(B*5+2)");
  GridTensor out;
  out.shape = p.grid;
  out.values = affine(p.w, x, p.b);
  return out;
}

void validate(const LossWeights& w) {
  require(w.lambda_coord > 0.0 && w.lambda_noobj > 0.0,
          "LossWeights: both weights must be positive");
}

LossTerms grid_loss(const GridTensor& pred, const FrameTarget& target,
                    const LossWeights& weights) {
  check_loss_inputs(pred, target);
  validate(weights);
  const GridTensor& t = target.target;
  const ResponsibilityMask& mask = target.mask;
  LossTerms out;
  auto& [coord, size, conf_obj, conf_noobj, scores] = out.terms;

  for (std::size_t cell = 0; cell < pred.shape.cells(); ++cell) {
    for (int j = 0; j < pred.shape.b; ++j) {
      const double dc =
          pred.at(cell, j, Slot::kConf) - t.at(cell, j, Slot::kConf);
      if (mask.is_responsible(cell, j)) {
        const double dx = pred.at(cell, j, Slot::kX) - t.at(cell, j, Slot::kX);
        const double dy = pred.at(cell, j, Slot::kY) - t.at(cell, j, Slot::kY);
        const double dh = sqrt_clamped(pred.at(cell, j, Slot::kH)) -
                          sqrt_clamped(t.at(cell, j, Slot::kH));
        const double dw = sqrt_clamped(pred.at(cell, j, Slot::kW)) -
                          sqrt_clamped(t.at(cell, j, Slot::kW));
        coord += dx * dx + dy * dy;
        size += dh * dh + dw * dw;
        conf_obj += dc * dc;
      }
      if (mask.is_not_responsible(cell, j)) conf_noobj += dc * dc;
    }
    if (mask.cell_has_object[cell]) {
      const double da = pred.ac(cell) - t.ac(cell);
      const double db = pred.bg(cell) - t.bg(cell);
      scores += da * da + db * db;
    }
  }
  coord *= weights.lambda_coord;
  size *= weights.lambda_coord;
  conf_noobj *= weights.lambda_noobj;
  out.total = coord + size + conf_obj + conf_noobj + scores;
  return out;
}

GridTensor loss_gradient(const GridTensor& pred, const FrameTarget& target,
                         const LossWeights& weights) {
  check_loss_inputs(pred, target);
  validate(weights);
  const GridTensor& t = target.target;
  const ResponsibilityMask& mask = target.mask;
  GridTensor g(pred.shape);
  const double lc = weights.lambda_coord;
  const double ln = weights.lambda_noobj;

  for (std::size_t cell = 0; cell < pred.shape.cells(); ++cell) {
    for (int j = 0; j < pred.shape.b; ++j) {
      const double dc =
          pred.at(cell, j, Slot::kConf) - t.at(cell, j, Slot::kConf);
      if (mask.is_responsible(cell, j)) {
        g.at(cell, j, Slot::kX) =
            2.0 * lc * (pred.at(cell, j, Slot::kX) - t.at(cell, j, Slot::kX));
        g.at(cell, j, Slot::kY) =
            2.0 * lc * (pred.at(cell, j, Slot::kY) - t.at(cell, j, Slot::kY));
        // d/dp (sqrt(p) - sqrt(q))^2 = (sqrt(p) - sqrt(q)) / sqrt(p); zero
        // on the clamped side.
        for (Slot s : {Slot::kW, Slot::kH}) {
          const double p = pred.at(cell, j, s);
          if (p > 0.0) {
            const double rp = std::sqrt(p);
            g.at(cell, j, s) = lc * (rp - sqrt_clamped(t.at(cell, j, s))) / rp;
          }
        }
        g.at(cell, j, Slot::kConf) += 2.0 * dc;
      }
      if (mask.is_not_responsible(cell, j)) {
        g.at(cell, j, Slot::kConf) += 2.0 * ln * dc;
      }
    }
    if (mask.cell_has_object[cell]) {
      g.ac(cell) = 2.0 * (pred.ac(cell) - t.ac(cell));
      g.bg(cell) = 2.0 * (pred.bg(cell) - t.bg(cell));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

std::vector<GridTensor> predict_sequence(const LstmParams& cell,
                                         const DenseParams& readout,
                                         std::span<const Vector> sequence) {
  std::vector<GridTensor> out;
  out.reserve(sequence.size());
  LstmState state = LstmState::zeros(cell.hidden_dim());
  for (const Vector& x : sequence) {
    LstmStepResult r = lstm_step(cell, x, state);
    out.push_back(readout_forward(readout, r.state.h));
    state = std::move(r.state);
  }
  return out;
}

double sequence_loss(const LstmParams& cell, const DenseParams& readout,
                     std::span<const Vector> sequence,
                     std::span<const FrameTarget> targets,
                     const LossWeights& weights) {
  check_sequence(cell.input_dim(), sequence, targets, readout,
                 cell.hidden_dim());
  const std::vector<GridTensor> preds = predict_sequence(cell, readout, sequence);
  double total = 0.0;
  for (std::size_t t = 0; t < preds.size(); ++t) {
    total += grid_loss(preds[t], targets[t], weights).total;
  }
  return total;
}

double sequence_loss(const RnnParams& cell, const DenseParams& readout,
                     std::span<const Vector> sequence,
                     std::span<const FrameTarget> targets,
                     const LossWeights& weights) {
  check_sequence(cell.input_dim(), sequence, targets, readout,
                 cell.output_dim());
  Vector h(cell.hidden_dim(), 0.0);
  double total = 0.0;
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    RnnStepResult r = rnn_step(cell, sequence[t], h);
    total +=
        grid_loss(readout_forward(readout, r.z), targets[t], weights).total;
    h = std::move(r.h);
  }
  return total;
}

LstmGradients bptt(const LstmParams& cell, const DenseParams& readout,
                   std::span<const Vector> sequence,
                   std::span<const FrameTarget> targets,
                   const LossWeights& weights) {
  const std::size_t hdim = cell.hidden_dim();
  check_sequence(cell.input_dim(), sequence, targets, readout, hdim);

  const std::size_t steps = sequence.size();
  std::vector<LstmStepResult> cache;
  cache.reserve(steps);
  std::vector<GridTensor> dpreds;
  dpreds.reserve(steps);

  LstmGradients out;
  out.cell = LstmParams(cell.input_dim(), hdim, cell.modulation);
  out.readout = DenseParams(readout.input_dim(), readout.grid);

  LstmState state = LstmState::zeros(hdim);
  for (std::size_t t = 0; t < steps; ++t) {
    cache.push_back(lstm_step(cell, sequence[t], state));
    const GridTensor pred = readout_forward(readout, cache.back().state.h);
    out.loss += grid_loss(pred, targets[t], weights).total;
    dpreds.push_back(loss_gradient(pred, targets[t], weights));
    state = cache.back().state;
  }

  const Vector zeros(hdim, 0.0);
  Vector dh_next(hdim, 0.0);
  Vector dc_next(hdim, 0.0);
  Vector da_i(hdim), da_f(hdim), da_o(hdim), da_g(hdim);
  for (std::size_t t = steps; t-- > 0;) {
    const LstmStepResult& r = cache[t];
    const Vector& h_prev = t > 0 ? cache[t - 1].state.h : zeros;
    const Vector& c_prev = t > 0 ? cache[t - 1].state.c : zeros;

    Vector dh = readout_backward(readout, r.state.h, dpreds[t], out.readout);
    for (std::size_t k = 0; k < hdim; ++k) dh[k] += dh_next[k];

    for (std::size_t k = 0; k < hdim; ++k) {
      const double d_o = dh[k] * r.tanh_c[k];
      const double dc = dh[k] * r.o[k] * (1.0 - r.tanh_c[k] * r.tanh_c[k]) +
                        dc_next[k];
      const double d_i = dc * r.g[k];
      const double d_g = dc * r.i[k];
      const double d_f = dc * c_prev[k];
      da_i[k] = d_i * r.i[k] * (1.0 - r.i[k]);
      da_f[k] = d_f * r.f[k] * (1.0 - r.f[k]);
      da_o[k] = d_o * r.o[k] * (1.0 - r.o[k]);
      da_g[k] = cell.modulation == Modulation::kSigmoid
                    ? d_g * r.g[k] * (1.0 - r.g[k])
                    : d_g * (1.0 - r.g[k] * r.g[k]);
      dc_next[k] = dc * r.f[k];
    }

    const std::span<const double> x = sequence[t];
    outer_acc(da_i, x, out.cell.w_xi);
    outer_acc(da_f, x, out.cell.w_xf);
    outer_acc(da_o, x, out.cell.w_xo);
    outer_acc(da_g, x, out.cell.w_xc);
    outer_acc(da_i, h_prev, out.cell.w_hi);
    outer_acc(da_f, h_prev, out.cell.w_hf);
    outer_acc(da_o, h_prev, out.cell.w_ho);
    outer_acc(da_g, h_prev, out.cell.w_hc);
    for (std::size_t k = 0; k < hdim; ++k) {
      out.cell.b_i[k] += da_i[k];
      out.cell.b_f[k] += da_f[k];
      out.cell.b_o[k] += da_o[k];
      out.cell.b_c[k] += da_g[k];
    }

    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    gemv_t_acc(cell.w_hi, da_i, dh_next);
    gemv_t_acc(cell.w_hf, da_f, dh_next);
    gemv_t_acc(cell.w_ho, da_o, dh_next);
    gemv_t_acc(cell.w_hc, da_g, dh_next);
  }
  return out;
}

RnnGradients bptt(const RnnParams& cell, const DenseParams& readout,
                  std::span<const Vector> sequence,
                  std::span<const FrameTarget> targets,
                  const LossWeights& weights) {
  const std::size_t hdim = cell.hidden_dim();
  check_sequence(cell.input_dim(), sequence, targets, readout,
                 cell.output_dim());

  const std::size_t steps = sequence.size();
  std::vector<RnnStepResult> cache;
  cache.reserve(steps);
  std::vector<GridTensor> dpreds;
  dpreds.reserve(steps);

  RnnGradients out;
  out.cell = RnnParams(cell.input_dim(), hdim, cell.output_dim());
  out.readout = DenseParams(readout.input_dim(), readout.grid);

  Vector h(hdim, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    cache.push_back(rnn_step(cell, sequence[t], h));
    const GridTensor pred = readout_forward(readout, cache.back().z);
    out.loss += grid_loss(pred, targets[t], weights).total;
    dpreds.push_back(loss_gradient(pred, targets[t], weights));
    h = cache.back().h;
  }

  const Vector zeros(hdim, 0.0);
  Vector dh_next(hdim, 0.0);
  for (std::size_t t = steps; t-- > 0;) {
    const RnnStepResult& r = cache[t];
    const Vector& h_prev = t > 0 ? cache[t - 1].h : zeros;

    Vector dz = readout_backward(readout, r.z, dpreds[t], out.readout);
    for (std::size_t k = 0; k < dz.size(); ++k) dz[k] *= r.z[k] * (1.0 - r.z[k]);
    outer_acc(dz, r.h, out.cell.w_hz);
    for (std::size_t k = 0; k < dz.size(); ++k) out.cell.b_z[k] += dz[k];

    Vector da = dh_next;
    gemv_t_acc(cell.w_hz, dz, da);
    for (std::size_t k = 0; k < hdim; ++k) da[k] *= r.h[k] * (1.0 - r.h[k]);
    outer_acc(da, sequence[t], out.cell.w_xh);
    outer_acc(da, h_prev, out.cell.w_hh);
    for (std::size_t k = 0; k < hdim; ++k) out.cell.b_h[k] += da[k];

    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    gemv_t_acc(cell.w_hh, da, dh_next);
  }
  return out;
}

DenseGradients static_gradient(const DenseParams& head,
                               std::span<const double> x,
                               const FrameTarget& target,
                               const LossWeights& weights) {
  const GridTensor pred = static_step(head, x);
  DenseGradients out;
  out.head = DenseParams(head.input_dim(), head.grid);
  out.loss = grid_loss(pred, target, weights).total;
  const GridTensor dpred = loss_gradient(pred, target, weights);
  outer_acc(dpred.values, x, out.head.w);
  out.head.b = dpred.values;
  return out;
}

// ---------------------------------------------------------------------------

void validate(const AdamState& s) {
  require(s.m.size() == s.v.size(), "AdamState: moment sizes differ");
  require(s.step >= 0, "AdamState: negative step");
  require(s.beta1 >= 0.0 && s.beta1 < 1.0 && s.beta2 >= 0.0 && s.beta2 < 1.0,
          "AdamState: betas must lie in [0, 1)");
  require(s.eps > 0.0 && s.lr > 0.0, "AdamState: eps and lr must be positive");
}

void adam_update_inplace(AdamState& s, std::span<double> params,
                         std::span<const double> grads) {
  validate(s);
  require(params.size() == grads.size() && params.size() == s.m.size(),
          "adam_update: parameter/gradient/state size mismatch");
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    s.m[k] = s.beta1 * s.m[k] + (1.0 - s.beta1) * grads[k];
    s.v[k] = s.beta2 * s.v[k] + (1.0 - s.beta2) * grads[k] * grads[k];
    const double m_hat = s.m[k] / c1;
    const double v_hat = s.v[k] / c2;
    params[k] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

AdamResult adam_update(const AdamState& state, std::span<const double> params,
                       std::span<const double> grads) {
  AdamResult out{Vector(params.begin(), params.end()), state};
  adam_update_inplace(out.state, out.params, grads);
  return out;
}

double learning_rate_at(int epoch, double initial, double decayed,
                        int decay_epoch) {
  return epoch < decay_epoch ? initial : decayed;
}

}  // namespace actube
