#include "actube/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace actube {
namespace {

double jitter(Rng& rng, double amplitude) {
  return amplitude > 0.0 ? rng.uniform(-amplitude, amplitude) : 0.0;
}

// Background-score profile of the tracked box: maximal on the segment
// boundary frames, falling linearly towards the segment middle, and settling
// at a plateau outside the segment.
double background_profile(int t, int start, int end) {
  const int d = std::min(std::abs(t - start), std::abs(t - end));
  if (t >= start && t <= end) {
    const double half = std::max(1.0, 0.5 * (end - start));
    return 0.9 - 0.8 * std::min(1.0, d / half);
  }
  return 0.6 + 0.3 * std::max(0.0, 1.0 - d / 3.0);
}

}  // namespace

void validate(const SyntheticSpec& s) {
  if (s.length < 1) throw std::invalid_argument("SyntheticSpec: length < 1");
  if (s.feature_side < 1) {
    throw std::invalid_argument("SyntheticSpec: feature_side < 1");
  }
  if (s.action_start < 0 || s.action_start > s.action_end ||
      s.action_end >= s.length) {
    throw std::invalid_argument(
        "SyntheticSpec: action segment must satisfy 0 <= start <= end < length");
  }
  if (!(s.start_box.w > 0.0 && s.start_box.h > 0.0)) {
    throw std::invalid_argument("SyntheticSpec: start box must have positive size");
  }
  validate(s.start_box);
  if (s.noise < 0.0 || s.distractors < 0) {
    throw std::invalid_argument("SyntheticSpec: negative noise or distractors");
  }
}

void render_box(const Box2D& box, double intensity, int side,
                std::span<double> frame) {
  const Corners c = box.corners();
  const double cell = 1.0 / side;
  for (int r = 0; r < side; ++r) {
    const double y0 = r * cell;
    const double oy = std::min(c.y1, y0 + cell) - std::max(c.y0, y0);
    if (oy <= 0.0) continue;
    for (int col = 0; col < side; ++col) {
      const double x0 = col * cell;
      const double ox = std::min(c.x1, x0 + cell) - std::max(c.x0, x0);
      if (ox <= 0.0) continue;
      frame[static_cast<std::size_t>(r * side + col)] +=
          intensity * (ox * oy) / (cell * cell);
    }
  }
}

Vector mirror_frame(std::span<const double> frame, int side) {
  Vector out(frame.size());
  for (int r = 0; r < side; ++r) {
    for (int col = 0; col < side; ++col) {
      out[static_cast<std::size_t>(r * side + col)] =
          frame[static_cast<std::size_t>(r * side + (side - 1 - col))];
    }
  }
  return out;
}

SyntheticVideo generate_synthetic(const SyntheticSpec& spec,
                                  const std::string& video_id) {
  validate(spec);
  Rng rng(spec.seed);
  SyntheticVideo out;
  out.video_id = video_id;

  const double w = spec.start_box.w;
  const double h = spec.start_box.h;
  for (int t = 0; t < spec.length; ++t) {
    double cx = spec.start_box.x + spec.vx * t + jitter(rng, 0.1 * spec.noise);
    double cy = spec.start_box.y + spec.vy * t + jitter(rng, 0.1 * spec.noise);
    cx = std::clamp(cx, 0.5 * w, 1.0 - 0.5 * w);
    cy = std::clamp(cy, 0.5 * h, 1.0 - 0.5 * h);
    out.trajectory.push_back(Box2D::make(cx, cy, w, h));
  }

  const std::size_t pixels =
      static_cast<std::size_t>(spec.feature_side) * spec.feature_side;
  for (int t = 0; t < spec.length; ++t) {
    Vector frame(pixels);
    for (double& p : frame) p = spec.noise > 0.0 ? rng.uniform(0.0, spec.noise) : 0.0;
    const bool acting = t >= spec.action_start && t <= spec.action_end;
    render_box(out.trajectory[static_cast<std::size_t>(t)],
               acting ? 1.0 : spec.idle_intensity, spec.feature_side, frame);
    out.features.push_back(std::move(frame));
  }

  out.gt.start = spec.action_start;
  out.gt.end = spec.action_end;
  out.gt.class_label = spec.class_label;
  out.gt.boxes.assign(out.trajectory.begin() + spec.action_start,
                      out.trajectory.begin() + spec.action_end + 1);

  out.oracle.video_id = video_id;
  const double n = spec.noise;
  for (int t = 0; t < spec.length; ++t) {
    FrameDetections f;
    f.frame_index = t;
    const Box2D& r = out.trajectory[static_cast<std::size_t>(t)];
    const bool acting = t >= spec.action_start && t <= spec.action_end;

    ScoredBox tracked;
    tracked.box = Box2D::make(r.x + jitter(rng, 0.05 * n * r.w),
                              r.y + jitter(rng, 0.05 * n * r.h),
                              r.w * (1.0 + jitter(rng, 0.1 * n)),
                              r.h * (1.0 + jitter(rng, 0.1 * n)));
    tracked.conf = (acting ? 0.9 : 0.6) + jitter(rng, n);
    tracked.ac = (acting ? 0.9 : 0.1) + jitter(rng, n);
    tracked.bg = background_profile(t, spec.action_start, spec.action_end) +
                 jitter(rng, 0.5 * n);

    for (int k = 0; k < spec.distractors; ++k) {
      ScoredBox d;
      const double dw = rng.uniform(0.1, 0.3);
      const double dh = rng.uniform(0.1, 0.3);
      d.box = Box2D::make(rng.uniform(0.5 * dw, 1.0 - 0.5 * dw),
                          rng.uniform(0.5 * dh, 1.0 - 0.5 * dh), dw, dh);
      d.conf = rng.uniform(0.1, 0.5);
      d.ac = rng.uniform(0.0, 0.3);
      d.bg = rng.uniform(0.5, 1.0);
      f.boxes.push_back(d);
    }
    const int slot = rng.uniform_int(0, spec.distractors);
    f.boxes.insert(f.boxes.begin() + slot, tracked);
    out.oracle.frames.push_back(std::move(f));
  }
  return out;
}

SyntheticSpec sample_spec(const SyntheticOptions& o, int feature_side,
                          Rng& rng) {
  SyntheticSpec s;
  s.length = o.length;
  s.feature_side = feature_side;
  s.noise = o.noise;
  s.distractors = o.distractors;
  const double w = rng.uniform(o.min_size, o.max_size);
  const double h = rng.uniform(o.min_size, o.max_size);
  s.start_box = Box2D::make(rng.uniform(0.5 * w, 1.0 - 0.5 * w),
                            rng.uniform(0.5 * h, 1.0 - 0.5 * h), w, h);
  s.vx = rng.uniform(-o.max_speed, o.max_speed);
  s.vy = rng.uniform(-o.max_speed, o.max_speed);
  if (rng.uniform() < o.untrimmed_fraction) {
    const int max_len = std::min(o.max_segment, o.length);
    const int len = rng.uniform_int(std::min(o.min_segment, max_len), max_len);
    s.action_start = rng.uniform_int(0, o.length - len);
    s.action_end = s.action_start + len - 1;
  } else {
    s.action_start = 0;
    s.action_end = o.length - 1;
  }
  s.seed = rng.next();
  return s;
}

std::vector<SyntheticVideo> generate_dataset(const SyntheticOptions& options,
                                             int feature_side, int count,
                                             std::uint64_t seed,
                                             const std::string& prefix) {
  Rng master(seed);
  std::vector<SyntheticVideo> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    Rng rng = master.fork(static_cast<std::uint64_t>(i));
    const SyntheticSpec spec = sample_spec(options, feature_side, rng);
    char name[32];
    std::snprintf(name, sizeof(name), "%04d", i);
    out.push_back(generate_synthetic(spec, prefix + name));
  }
  return out;
}

}  // namespace actube
