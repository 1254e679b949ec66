// A complete regression head (static, LSTM or plain RNN) with its readout,
// inference to frame detections and the checkpoint file format.

#ifndef ACTUBE_MODEL_HPP_
#define ACTUBE_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actube/config.hpp"
#include "actube/formats.hpp"
#include "actube/neural_head.hpp"

namespace actube {

struct Model {
  HeadKind head = HeadKind::kStatic;
  DenseParams dense;  // the static head, or the readout of a recurrent head
  LstmParams lstm;    // used when head == kLstm
  RnnParams rnn;      // used when head == kRnn
  std::uint64_t seed = 0;

  std::size_t input_dim() const;
  std::size_t hidden_dim() const;
  const GridShape& grid() const { return dense.grid; }

  // Concatenated trainable parameters: cell arrays (if any), then dense.
  Vector parameters() const;
  void set_parameters(std::span<const double> flat);

  friend bool operator==(const Model&, const Model&) = default;
};

// Freshly initialized model for `input_dim` features.
Model make_model(const PipelineConfig& config, std::size_t input_dim,
                 std::uint64_t seed);

// One grid tensor per frame. Recurrent heads run over the whole sequence
// from a zero state.
std::vector<GridTensor> predict(const Model& model,
                                std::span<const Vector> frames);

// Decodes every predicted box of every frame (no thresholding).
VideoDetections infer(const Model& model, const VideoFeatures& video);

// Textual checkpoint; layout documented in docs/checkpoint.md.
std::string format_checkpoint(const Model& model);
Model parse_checkpoint(const std::string& text, const std::string& file);

inline Model load_checkpoint(const std::string& path) {
  return parse_checkpoint(read_file(path), path);
}

}  // namespace actube

#endif  // ACTUBE_MODEL_HPP_
