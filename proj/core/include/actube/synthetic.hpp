// Synthetic untrimmed videos: a rectangle drifting across a noisy frame,
// "acting" during one temporal segment.
//
// Inside the action segment the rectangle is rendered at full intensity and
// the ground-truth tube follows it; outside it is rendered dimmer. Oracle
// detections put a confident, high-actionness box on the rectangle during the
// action and lower-confidence, background-scored boxes elsewhere. The
// background score of the tracked box peaks at the segment boundaries.

#ifndef ACTUBE_SYNTHETIC_HPP_
#define ACTUBE_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "actube/config.hpp"
#include "actube/formats.hpp"
#include "actube/geometry.hpp"
#include "actube/neural_head.hpp"
#include "actube/rng.hpp"

namespace actube {

struct SyntheticSpec {
  int length = 50;
  int feature_side = 16;
  Box2D start_box{0.5, 0.5, 0.3, 0.3};
  double vx = 0.0;  // per-frame center velocity
  double vy = 0.0;
  int action_start = 0;
  int action_end = 49;  // inclusive
  double noise = 0.05;
  int distractors = 2;
  double idle_intensity = 0.4;
  std::string class_label = "move";
  std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& s);

struct SyntheticVideo {
  std::string video_id;
  std::vector<Vector> features;       // one rendered frame per time step
  std::vector<Box2D> trajectory;      // rectangle box in every frame
  GroundTruthTube gt;                 // the action segment
  VideoDetections oracle;
};

SyntheticVideo generate_synthetic(const SyntheticSpec& spec,
                                  const std::string& video_id);

// Rasterizes `box` (coverage-weighted) at `intensity` on top of `frame`
// (row-major side x side).
void render_box(const Box2D& box, double intensity, int side,
                std::span<double> frame);

// Horizontal flip of a row-major side x side frame.
Vector mirror_frame(std::span<const double> frame, int side);

// Samples a spec: random size, start and velocity; with probability
// untrimmed_fraction the action covers a random sub-segment, otherwise the
// whole clip.
SyntheticSpec sample_spec(const SyntheticOptions& options, int feature_side,
                          Rng& rng);

// `count` videos named "<prefix>0000", ... with per-video seeds forked from
// `seed`.
std::vector<SyntheticVideo> generate_dataset(const SyntheticOptions& options,
                                             int feature_side, int count,
                                             std::uint64_t seed,
                                             const std::string& prefix = "vid");

}  // namespace actube

#endif  // ACTUBE_SYNTHETIC_HPP_
