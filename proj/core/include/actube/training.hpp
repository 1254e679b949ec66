// Desk-scale training of the regression heads with Adam and a step-decayed
// learning rate.

#ifndef ACTUBE_TRAINING_HPP_
#define ACTUBE_TRAINING_HPP_

#include <functional>
#include <vector>

#include "actube/config.hpp"
#include "actube/model.hpp"
#include "actube/synthetic.hpp"

namespace actube {

struct TrainingVideo {
  std::vector<Vector> features;
  std::vector<std::vector<Box2D>> gt_boxes;  // per frame, possibly empty
};

TrainingVideo to_training_video(const SyntheticVideo& v);

// Builds training videos from features and ground-truth tubes keyed by video
// id; frames outside every tube have no boxes.
std::vector<TrainingVideo> training_videos(
    const std::vector<VideoFeatures>& features, const GroundTruthSet& gts);

struct EpochStats {
  int epoch = 0;
  double learning_rate = 0.0;
  double mean_loss = 0.0;  // per frame
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Trains config.model.head on `videos` for config.train.epochs epochs.
// Static heads see shuffled frames; recurrent heads see shuffled chunks of
// config.train.sequence_length frames. Mirroring flips frames and boxes
// horizontally at random (requires square feature_side x feature_side
// frames). Deterministic for a fixed config.seed.
Model train(const std::vector<TrainingVideo>& videos,
            const PipelineConfig& config, const EpochCallback& on_epoch = {});

}  // namespace actube

#endif  // ACTUBE_TRAINING_HPP_
