#include "actube/path_linker.hpp"

#include <string>

namespace actube {

void validate(const LinkConfig& c) {
  if (!(c.lambda0 >= 0.0)) {
    throw std::invalid_argument("LinkConfig: lambda0 must be >= 0");
  }
  if (c.max_paths < 1) {
    throw std::invalid_argument("LinkConfig: max_paths must be >= 1");
  }
}

double path_score(const TubePath& p, double lambda0) {
  double unary = 0.0;
  double pairwise = 0.0;
  for (std::size_t t = 0; t < p.boxes.size(); ++t) {
    unary += p.boxes[t].conf;
    if (t > 0) pairwise += iou(p.boxes[t].box, p.boxes[t - 1].box);
  }
  return unary + lambda0 * pairwise;
}

ScoredPath viterbi_link(const VideoDetections& video, const LinkConfig& config) {
  validate(config);
  const std::size_t steps = video.frames.size();
  if (steps == 0) throw std::invalid_argument("viterbi_link: video has no frames");
  for (const FrameDetections& f : video.frames) {
    if (f.boxes.empty()) throw EmptyFrameError(f.frame_index);
  }

  // best[t][j]: best score of a path over frames 0..t ending in box j.
  std::vector<std::vector<double>> best(steps);
  std::vector<std::vector<std::size_t>> back(steps);
  const auto& first = video.frames[0].boxes;
  best[0].resize(first.size());
  for (std::size_t j = 0; j < first.size(); ++j) best[0][j] = first[j].conf;

  for (std::size_t t = 1; t < steps; ++t) {
    const auto& cur = video.frames[t].boxes;
    const auto& prev = video.frames[t - 1].boxes;
    best[t].resize(cur.size());
    back[t].resize(cur.size());
    for (std::size_t j = 0; j < cur.size(); ++j) {
      std::size_t arg = 0;
      double top = 0.0;
      for (std::size_t k = 0; k < prev.size(); ++k) {
        const double v =
            best[t - 1][k] + config.lambda0 * iou(cur[j].box, prev[k].box);
        if (k == 0 || v > top) {
          top = v;
          arg = k;
        }
      }
      best[t][j] = cur[j].conf + top;
      back[t][j] = arg;
    }
  }

  std::size_t end = 0;
  for (std::size_t j = 1; j < best[steps - 1].size(); ++j) {
    if (best[steps - 1][j] > best[steps - 1][end]) end = j;
  }

  ScoredPath out;
  out.box_indices.resize(steps);
  out.box_indices[steps - 1] = end;
  for (std::size_t t = steps - 1; t > 0; --t) {
    out.box_indices[t - 1] = back[t][out.box_indices[t]];
  }
  out.path.start = video.frames.front().frame_index;
  out.path.end = video.frames.back().frame_index;
  out.path.boxes.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    out.path.boxes.push_back(video.frames[t].boxes[out.box_indices[t]]);
  }
  out.score = path_score(out.path, config.lambda0);
  return out;
}

std::vector<ScoredPath> extract_paths(const VideoDetections& video,
                                      const LinkConfig& config) {
  validate(config);
  std::vector<ScoredPath> out;
  if (video.frames.empty()) return out;

  VideoDetections work = video;
  // origin[t][j]: index in the caller's frame t of work box j.
  std::vector<std::vector<std::size_t>> origin(video.frames.size());
  for (std::size_t t = 0; t < video.frames.size(); ++t) {
    origin[t].resize(video.frames[t].boxes.size());
    for (std::size_t j = 0; j < origin[t].size(); ++j) origin[t][j] = j;
  }

  const auto any_empty = [&] {
    for (const FrameDetections& f : work.frames) {
      if (f.boxes.empty()) return true;
    }
    return false;
  };

  while (static_cast<int>(out.size()) < config.max_paths && !any_empty()) {
    ScoredPath p = viterbi_link(work, config);
    for (std::size_t t = 0; t < work.frames.size(); ++t) {
      const std::size_t j = p.box_indices[t];
      p.box_indices[t] = origin[t][j];
      work.frames[t].boxes.erase(work.frames[t].boxes.begin() +
                                 static_cast<std::ptrdiff_t>(j));
      origin[t].erase(origin[t].begin() + static_cast<std::ptrdiff_t>(j));
    }
    out.push_back(std::move(p));
  }
  return out;
}

VideoDetections fuse_streams(const VideoDetections& a,
                             const VideoDetections& b) {
  if (a.video_id != b.video_id) {
    throw std::invalid_argument("fuse_streams: video ids differ ('" +
                                a.video_id + "' vs '" + b.video_id + "')");
  }
  if (a.frames.size() != b.frames.size()) {
    throw std::invalid_argument("fuse_streams: frame counts differ (" +
                                std::to_string(a.frames.size()) + " vs " +
                                std::to_string(b.frames.size()) + ")");
  }
  VideoDetections out = a;
  for (std::size_t t = 0; t < out.frames.size(); ++t) {
    if (a.frames[t].frame_index != b.frames[t].frame_index) {
      throw std::invalid_argument("fuse_streams: frame index mismatch");
    }
    auto& dst = out.frames[t].boxes;
    dst.insert(dst.end(), b.frames[t].boxes.begin(), b.frames[t].boxes.end());
  }
  return out;
}

}  // namespace actube
