#include "actube/training.hpp"

#include <algorithm>
#include <stdexcept>

namespace actube {
namespace {

struct Sample {
  std::size_t video;
  std::size_t begin;  // first frame
  std::size_t end;    // one past the last frame
  bool mirrored;
};

template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
    std::swap(items[i - 1], items[j]);
  }
}

std::vector<Box2D> mirrored_boxes(const std::vector<Box2D>& boxes) {
  std::vector<Box2D> out;
  out.reserve(boxes.size());
  for (const Box2D& b : boxes) out.push_back(mirror_box(b));
  return out;
}

// Frame features and boxes of one sample, mirrored when requested.
void materialize(const TrainingVideo& v, const Sample& s, int side,
                 std::vector<Vector>& frames,
                 std::vector<std::vector<Box2D>>& boxes) {
  frames.clear();
  boxes.clear();
  for (std::size_t t = s.begin; t < s.end; ++t) {
    if (s.mirrored) {
      frames.push_back(mirror_frame(v.features[t], side));
      boxes.push_back(mirrored_boxes(v.gt_boxes[t]));
    } else {
      frames.push_back(v.features[t]);
      boxes.push_back(v.gt_boxes[t]);
    }
  }
}

void add_into(Vector& acc, const Vector& v) {
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
}

}  // namespace

TrainingVideo to_training_video(const SyntheticVideo& v) {
  TrainingVideo out;
  out.features = v.features;
  out.gt_boxes.resize(v.features.size());
  for (int t = v.gt.start; t <= v.gt.end; ++t) {
    out.gt_boxes[static_cast<std::size_t>(t)].push_back(v.gt.at_frame(t));
  }
  return out;
}

std::vector<TrainingVideo> training_videos(
    const std::vector<VideoFeatures>& features, const GroundTruthSet& gts) {
  std::vector<TrainingVideo> out;
  for (const VideoFeatures& f : features) {
    TrainingVideo v;
    v.features = f.frames;
    v.gt_boxes.resize(f.frames.size());
    auto it = gts.find(f.video_id);
    if (it != gts.end()) {
      for (const GroundTruthTube& g : it->second) {
        if (g.end >= static_cast<int>(f.frames.size())) {
          throw std::invalid_argument("ground truth for '" + f.video_id +
                                      "' extends past its last frame");
        }
        for (int t = g.start; t <= g.end; ++t) {
          v.gt_boxes[static_cast<std::size_t>(t)].push_back(g.at_frame(t));
        }
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

Model train(const std::vector<TrainingVideo>& videos,
            const PipelineConfig& config, const EpochCallback& on_epoch) {
  validate(config);
  if (videos.empty() || videos.front().features.empty()) {
    throw std::invalid_argument("train: no training frames");
  }
  const std::size_t input_dim = videos.front().features.front().size();
  const int side = config.model.feature_side;
  for (const TrainingVideo& v : videos) {
    if (v.features.size() != v.gt_boxes.size()) {
      throw std::invalid_argument("train: features/boxes length mismatch");
    }
    for (const Vector& x : v.features) {
      if (x.size() != input_dim) {
        throw std::invalid_argument("train: inconsistent feature length");
      }
    }
  }
  if (config.train.mirror &&
      input_dim != static_cast<std::size_t>(side) * static_cast<std::size_t>(side)) {
    throw std::invalid_argument(
        "train: mirroring needs feature_side^2 features per frame");
  }

  Rng rng(config.seed);
  Model model = make_model(config, input_dim, rng.next());
  Vector params = model.parameters();
  AdamState adam = AdamState::for_size(params.size(), config.train.learning_rate);

  const bool recurrent = model.head != HeadKind::kStatic;
  const std::size_t chunk =
      recurrent ? static_cast<std::size_t>(config.train.sequence_length) : 1;
  std::vector<Sample> samples;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    const std::size_t len = videos[v].features.size();
    for (std::size_t b = 0; b < len; b += chunk) {
      samples.push_back({v, b, std::min(len, b + chunk), false});
    }
  }

  std::vector<Vector> frames;
  std::vector<std::vector<Box2D>> boxes;
  std::vector<FrameTarget> targets;
  Vector grad(params.size());
  for (int epoch = 0; epoch < config.train.epochs; ++epoch) {
    adam.lr = learning_rate_at(epoch, config.train.learning_rate,
                               config.train.decayed_learning_rate,
                               config.train.decay_epoch);
    shuffle(samples, rng);
    for (Sample& s : samples) s.mirrored = config.train.mirror && rng.uniform() < 0.5;

    double epoch_loss = 0.0;
    std::size_t epoch_frames = 0;
    const auto batch = static_cast<std::size_t>(config.train.batch_size);
    for (std::size_t first = 0; first < samples.size(); first += batch) {
      const std::size_t last = std::min(samples.size(), first + batch);
      std::fill(grad.begin(), grad.end(), 0.0);
      std::size_t batch_frames = 0;

      for (std::size_t i = first; i < last; ++i) {
        materialize(videos[samples[i].video], samples[i], side, frames, boxes);
        const std::vector<GridTensor> preds = predict(model, frames);
        targets.clear();
        for (std::size_t t = 0; t < frames.size(); ++t) {
          targets.push_back(encode_target(boxes[t], preds[t]));
        }
        batch_frames += frames.size();

        switch (model.head) {
          case HeadKind::kStatic: {
            const GridTensor dpred =
                loss_gradient(preds[0], targets[0], config.loss);
            epoch_loss += grid_loss(preds[0], targets[0], config.loss).total;
            // dense layout: w (rows x cols) then b
            const std::size_t cols = model.dense.w.cols;
            for (std::size_t r = 0; r < dpred.values.size(); ++r) {
              const double g = dpred.values[r];
              if (g == 0.0) continue;
              double* row = grad.data() + r * cols;
              const Vector& x = frames[0];
              for (std::size_t c = 0; c < cols; ++c) row[c] += g * x[c];
              grad[model.dense.w.data.size() + r] += g;
            }
            break;
          }
          case HeadKind::kLstm: {
            LstmGradients g =
                bptt(model.lstm, model.dense, frames, targets, config.loss);
            epoch_loss += g.loss;
            Model gm = model;
            gm.lstm = std::move(g.cell);
            gm.dense = std::move(g.readout);
            add_into(grad, gm.parameters());
            break;
          }
          case HeadKind::kRnn: {
            RnnGradients g =
                bptt(model.rnn, model.dense, frames, targets, config.loss);
            epoch_loss += g.loss;
            Model gm = model;
            gm.rnn = std::move(g.cell);
            gm.dense = std::move(g.readout);
            add_into(grad, gm.parameters());
            break;
          }
        }
      }
      epoch_frames += batch_frames;
      const double scale = 1.0 / static_cast<double>(last - first);
      for (double& g : grad) g *= scale;
      adam_update_inplace(adam, params, grad);
      model.set_parameters(params);
    }
    if (on_epoch) {
      on_epoch(EpochStats{epoch, adam.lr,
                          epoch_loss / static_cast<double>(std::max<std::size_t>(epoch_frames, 1))});
    }
  }
  return model;
}

}  // namespace actube
