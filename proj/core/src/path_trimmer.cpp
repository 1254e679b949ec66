#include "actube/path_trimmer.hpp"

#include <algorithm>
#include <stdexcept>

namespace actube {

void validate(const TrimConfig& c) {
  if (c.smooth_window < 1 || c.smooth_window % 2 == 0) {
    throw std::invalid_argument("TrimConfig: smooth_window must be odd and >= 1");
  }
  if (c.neighborhood < 1) {
    throw std::invalid_argument("TrimConfig: neighborhood must be >= 1");
  }
}

std::vector<double> smooth(std::span<const double> series, int window) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("smooth: window must be odd and >= 1");
  }
  const int n = static_cast<int>(series.size());
  const int half = window / 2;
  std::vector<double> out(series.size());
  // Direct sums (not a sliding accumulator) so that equal windows produce
  // bit-identical averages.
  for (int t = 0; t < n; ++t) {
    const int lo = std::max(0, t - half);
    const int hi = std::min(n - 1, t + half);
    double sum = 0.0;
    for (int i = lo; i <= hi; ++i) sum += series[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(t)] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

std::vector<int> find_peaks(std::span<const double> series, int n) {
  if (n < 1) throw std::invalid_argument("find_peaks: n must be >= 1");
  const int len = static_cast<int>(series.size());
  const auto at = [&](int i) { return series[static_cast<std::size_t>(i)]; };

  std::vector<bool> candidate(series.size(), false);
  for (int t = 0; t < len; ++t) {
    const int lo = std::max(0, t - n);
    const int hi = std::min(len - 1, t + n);
    bool is_max = true;
    for (int i = lo; i <= hi && is_max; ++i) is_max = at(i) <= at(t);
    candidate[static_cast<std::size_t>(t)] = is_max;
  }

  std::vector<int> peaks;
  int t = 0;
  while (t < len) {
    if (!candidate[static_cast<std::size_t>(t)]) {
      ++t;
      continue;
    }
    int run_end = t;
    while (run_end + 1 < len && candidate[static_cast<std::size_t>(run_end + 1)] &&
           at(run_end + 1) == at(t)) {
      ++run_end;
    }
    const int lo = std::max(0, t - n);
    const int hi = std::min(len - 1, run_end + n);
    bool has_lower = false;
    for (int i = lo; i <= hi && !has_lower; ++i) has_lower = at(i) < at(t);
    if (has_lower) peaks.push_back(t);
    t = run_end + 1;
  }
  return peaks;
}

std::vector<std::pair<int, int>> segments_from_peaks(int length,
                                                     const PeakSet& peaks) {
  std::vector<std::pair<int, int>> out;
  for (int p : peaks.ac) {
    int s = 0;
    int e = length - 1;
    for (int b : peaks.bg) {
      if (b < p) s = b;
      if (b > p) {
        e = b;
        break;
      }
    }
    const std::pair<int, int> seg{s, e};
    if (std::find(out.begin(), out.end(), seg) == out.end()) out.push_back(seg);
  }
  return out;
}

PeakSet path_peaks(const TubePath& path, const TrimConfig& config) {
  validate(config);
  std::vector<double> ac(path.boxes.size());
  std::vector<double> bg(path.boxes.size());
  for (std::size_t t = 0; t < path.boxes.size(); ++t) {
    ac[t] = path.boxes[t].ac;
    bg[t] = path.boxes[t].bg;
  }
  PeakSet peaks;
  peaks.ac = find_peaks(smooth(ac, config.smooth_window), config.neighborhood);
  peaks.bg = find_peaks(smooth(bg, config.smooth_window), config.neighborhood);
  return peaks;
}

TrimResult trim(const TubePath& path, const TrimConfig& config) {
  validate(path);
  const PeakSet peaks = path_peaks(path, config);
  const int len = path.length();

  TrimResult out;
  out.labels.assign(static_cast<std::size_t>(len), 0);
  if (peaks.ac.empty()) {
    out.segments.push_back(path);
    std::fill(out.labels.begin(), out.labels.end(), 1);
    return out;
  }
  for (const auto& [s, e] : segments_from_peaks(len, peaks)) {
    TubePath seg;
    seg.start = path.start + s;
    seg.end = path.start + e;
    seg.boxes.assign(path.boxes.begin() + s, path.boxes.begin() + e + 1);
    out.segments.push_back(std::move(seg));
    std::fill(out.labels.begin() + s, out.labels.begin() + e + 1, 1);
  }
  return out;
}

}  // namespace actube
