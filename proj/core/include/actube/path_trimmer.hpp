// Temporal trimming of video-spanning paths from the peaks of their smoothed
// actionness and background score profiles.

#ifndef ACTUBE_PATH_TRIMMER_HPP_
#define ACTUBE_PATH_TRIMMER_HPP_

#include <span>
#include <utility>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

struct TrimConfig {
  int smooth_window = 5;  // odd
  int neighborhood = 5;   // peak half-width n
};

void validate(const TrimConfig& c);

struct PeakSet {
  std::vector<int> ac;
  std::vector<int> bg;
};

struct TrimResult {
  std::vector<TubePath> segments;
  std::vector<int> labels;  // 1 = action, 0 = background; one per path frame
};

// Centered running average. Near the ends the window is truncated to the
// samples that exist within the half-width.
std::vector<double> smooth(std::span<const double> series, int window);

// Offsets t with series[t] == max(series[t-n .. t+n]) (clipped). A run of
// adjacent equal-valued maxima reports only its leftmost index, and a run
// whose whole neighborhood is flat is not a peak (so a constant series has
// none).
std::vector<int> find_peaks(std::span<const double> series, int n);

// For each actionness peak p: [last background peak < p, first background
// peak > p], defaulting to the series ends. Pairs are unique, in order of
// first appearance.
std::vector<std::pair<int, int>> segments_from_peaks(int length,
                                                     const PeakSet& peaks);

PeakSet path_peaks(const TubePath& path, const TrimConfig& config);

// Without any actionness peak the whole path is returned as one segment.
TrimResult trim(const TubePath& path, const TrimConfig& config);

}  // namespace actube

#endif  // ACTUBE_PATH_TRIMMER_HPP_
