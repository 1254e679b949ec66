// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's geometry, linking or metrics code.

#ifndef ACTUBE_TESTS_ORACLES_HPP_
#define ACTUBE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "actube/geometry.hpp"
#include "actube/rng.hpp"

namespace actube::oracle {

// Area-sampling IoU: counts sample points at cell centers of a res x res grid
// over the unit square.
inline double raster_iou(const Box2D& a, const Box2D& b, int res = 1000) {
  auto inside = [](const Box2D& r, double px, double py) {
    return std::abs(px - r.x) <= r.w / 2 && std::abs(py - r.y) <= r.h / 2;
  };
  long in_a = 0, in_b = 0, both = 0;
  for (int i = 0; i < res; ++i) {
    const double py = (i + 0.5) / res;
    for (int j = 0; j < res; ++j) {
      const double px = (j + 0.5) / res;
      const bool ia = inside(a, px, py);
      const bool ib = inside(b, px, py);
      in_a += ia;
      in_b += ib;
      both += ia && ib;
    }
  }
  const long uni = in_a + in_b - both;
  return uni == 0 ? 0.0 : static_cast<double>(both) / static_cast<double>(uni);
}

// Closed-form IoU written from scratch: clip both boxes to the unit square,
// then intersect.
inline double exact_iou(const Box2D& a, const Box2D& b) {
  auto clip = [](double v) { return std::clamp(v, 0.0, 1.0); };
  const double ax0 = clip(a.x - a.w / 2), ax1 = clip(a.x + a.w / 2);
  const double ay0 = clip(a.y - a.h / 2), ay1 = clip(a.y + a.h / 2);
  const double bx0 = clip(b.x - b.w / 2), bx1 = clip(b.x + b.w / 2);
  const double by0 = clip(b.y - b.h / 2), by1 = clip(b.y + b.h / 2);
  const double iw = std::max(0.0, std::min(ax1, bx1) - std::max(ax0, bx0));
  const double ih = std::max(0.0, std::min(ay1, by1) - std::max(ay0, by0));
  const double inter = iw * ih;
  const double uni =
      (ax1 - ax0) * (ay1 - ay0) + (bx1 - bx0) * (by1 - by0) - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

inline Box2D random_box(Rng& rng, double min_size = 0.05,
                        double max_size = 0.5) {
  return Box2D{rng.uniform(), rng.uniform(), rng.uniform(min_size, max_size),
               rng.uniform(min_size, max_size)};
}

inline ScoredBox random_scored_box(Rng& rng) {
  return ScoredBox{random_box(rng), rng.uniform(), rng.uniform(),
                   rng.uniform()};
}

inline VideoDetections random_video(Rng& rng, int length, int max_boxes,
                                    const std::string& id = "v") {
  VideoDetections v;
  v.video_id = id;
  for (int t = 0; t < length; ++t) {
    FrameDetections f;
    f.frame_index = t;
    const int n = rng.uniform_int(1, max_boxes);
    for (int i = 0; i < n; ++i) f.boxes.push_back(random_scored_box(rng));
    v.frames.push_back(std::move(f));
  }
  return v;
}

// Best path score over all full-length paths by exhaustive enumeration.
inline double enumerate_best_score(const VideoDetections& v, double lambda0) {
  const std::size_t T = v.frames.size();
  std::vector<std::size_t> pick(T, 0);
  double best = -INFINITY;
  while (true) {
    double s = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const ScoredBox& b = v.frames[t].boxes[pick[t]];
      s += b.conf;
      if (t > 0) {
        s += lambda0 * exact_iou(v.frames[t - 1].boxes[pick[t - 1]].box, b.box);
      }
    }
    best = std::max(best, s);
    std::size_t t = 0;
    while (t < T && ++pick[t] == v.frames[t].boxes.size()) pick[t++] = 0;
    if (t == T) break;
  }
  return best;
}

// Tube overlap by a frame-by-frame walk over the temporal union.
inline double naive_overlap(const TubePath& d, const GroundTruthTube& g) {
  const int lo = std::min(d.start, g.start);
  const int hi = std::max(d.end, g.end);
  double sum = 0.0;
  int uni = 0;
  for (int t = lo; t <= hi; ++t) {
    const bool in_d = t >= d.start && t <= d.end;
    const bool in_g = t >= g.start && t <= g.end;
    if (in_d || in_g) ++uni;
    if (in_d && in_g) {
      sum += exact_iou(d.boxes[static_cast<std::size_t>(t - d.start)].box,
                       g.boxes[static_cast<std::size_t>(t - g.start)]);
    }
  }
  return uni == 0 ? 0.0 : sum / uni;
}

struct NaiveMetrics {
  std::vector<double> best;  // per GT; -1 when there are no proposals
  double abo = 0.0;
  std::map<std::string, double> abo_per_class;
  double mabo = 0.0;
  std::vector<double> recall;  // per threshold
};

inline NaiveMetrics naive_metrics(const std::vector<TubePath>& proposals,
                                  const std::vector<GroundTruthTube>& gts,
                                  const std::vector<double>& thresholds) {
  NaiveMetrics m;
  std::map<std::string, std::pair<double, int>> per_class;
  for (const GroundTruthTube& g : gts) {
    double best = -1.0;
    for (const TubePath& d : proposals) best = std::max(best, naive_overlap(d, g));
    m.best.push_back(best);
    m.abo += std::max(best, 0.0);
    per_class[g.class_label].first += std::max(best, 0.0);
    per_class[g.class_label].second += 1;
  }
  m.abo /= static_cast<double>(gts.size());
  for (const auto& [label, acc] : per_class) {
    m.abo_per_class[label] = acc.first / acc.second;
    m.mabo += acc.first / acc.second;
  }
  m.mabo /= static_cast<double>(per_class.size());
  for (double eta : thresholds) {
    int hit = 0;
    for (double b : m.best) hit += b >= 0.0 && b >= eta;
    m.recall.push_back(static_cast<double>(hit) / static_cast<double>(gts.size()));
  }
  return m;
}

// Central finite difference of f at x along every coordinate.
inline std::vector<double> central_difference(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> x, double step) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + step;
    const double up = f(x);
    x[i] = keep - step;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

// |a - n| / max(|a|, |n|, floor): relative error with an absolute floor so
// near-zero gradients are judged in absolute terms (central differences of an
// O(10) loss carry roundoff around 1e-10 at step 1e-5).
inline double relative_error(double analytic, double numeric,
                             double floor = 1e-4) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

inline double max_relative_error(std::span<const double> analytic,
                                 std::span<const double> numeric,
                                 double floor = 1e-4) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, relative_error(analytic[i], numeric[i], floor));
  }
  return worst;
}

}  // namespace actube::oracle

#endif  // ACTUBE_TESTS_ORACLES_HPP_
