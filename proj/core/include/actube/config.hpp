// Pipeline configuration and its JSON representation.

#ifndef ACTUBE_CONFIG_HPP_
#define ACTUBE_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "actube/grid_codec.hpp"
#include "actube/neural_head.hpp"
#include "actube/path_linker.hpp"
#include "actube/path_trimmer.hpp"

namespace actube {

enum class HeadKind { kStatic, kLstm, kRnn };

std::string_view to_string(HeadKind h);
HeadKind head_from_string(std::string_view s);

struct TrainSchedule {
  int epochs = 100;
  int batch_size = 32;        // frames (static) or sequences (recurrent)
  int sequence_length = 10;   // recurrent heads
  double learning_rate = 1e-4;
  double decayed_learning_rate = 1e-5;
  int decay_epoch = 20;
  bool mirror = true;         // random horizontal flips
};

struct ModelConfig {
  HeadKind head = HeadKind::kStatic;
  int hidden = 32;            // recurrent hidden size H (and RNN output size)
  Modulation modulation = Modulation::kSigmoid;
  int feature_side = 16;      // frames are feature_side x feature_side pixels
};

struct SyntheticOptions {
  int videos = 100;
  int length = 50;
  double untrimmed_fraction = 0.25;
  int min_segment = 10;
  int max_segment = 25;
  double noise = 0.05;
  double max_speed = 0.01;    // per-frame center displacement bound
  double min_size = 0.25;
  double max_size = 0.4;
  int distractors = 2;        // oracle noise boxes per frame
};

struct PipelineConfig {
  GridShape grid{7, 2};
  LossWeights loss;
  LinkConfig link;
  TrimConfig trim;
  bool trim_enabled = true;
  TrainSchedule train;
  ModelConfig model;
  SyntheticOptions synthetic;
  std::uint64_t seed = 0;
};

void validate(const PipelineConfig& c);

// Missing fields keep their defaults; unknown fields and wrong types are
// errors (std::invalid_argument naming the field).
PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const PipelineConfig& c);

PipelineConfig load_config(const std::string& path);

}  // namespace actube

#endif  // ACTUBE_CONFIG_HPP_
