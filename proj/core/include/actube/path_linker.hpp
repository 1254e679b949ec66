// Links per-frame detections into video-spanning paths.
//
// A path picks one box per frame; its score is
//   sum_t conf(b_t) + lambda0 * sum_{t > start} iou(b_t, b_{t-1}).
// The best full-length path is found by dynamic programming; further paths
// are extracted greedily after removing the boxes already used.

#ifndef ACTUBE_PATH_LINKER_HPP_
#define ACTUBE_PATH_LINKER_HPP_

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

struct LinkConfig {
  double lambda0 = 1.0;
  int max_paths = 100;
};

void validate(const LinkConfig& c);

struct ScoredPath {
  TubePath path;
  double score = 0.0;
  // Index of the chosen box within each frame of the input handed to the
  // linker (for extract_paths: the original, unreduced input).
  std::vector<std::size_t> box_indices;
};

class EmptyFrameError : public std::runtime_error {
 public:
  explicit EmptyFrameError(int frame)
      : std::runtime_error("frame " + std::to_string(frame) + " has no boxes"),
        frame_(frame) {}
  int frame() const { return frame_; }

 private:
  int frame_;
};

double path_score(const TubePath& p, double lambda0);

// Exact maximizer of path_score over all full-length paths. Ties resolve to
// the lowest box index, both in the recurrence and at the terminal frame.
// Throws EmptyFrameError when a frame has no boxes.
ScoredPath viterbi_link(const VideoDetections& video, const LinkConfig& config);

// Greedy extraction in extraction order. Stops when a frame runs out of boxes
// or max_paths is reached; empty when some frame starts empty.
std::vector<ScoredPath> extract_paths(const VideoDetections& video,
                                      const LinkConfig& config);

// Per-frame concatenation, `a`'s boxes first.
VideoDetections fuse_streams(const VideoDetections& a,
                             const VideoDetections& b);

}  // namespace actube

#endif  // ACTUBE_PATH_LINKER_HPP_
