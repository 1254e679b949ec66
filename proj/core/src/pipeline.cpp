#include "actube/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <stdexcept>
#include <thread>

namespace actube {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

VideoProposals link_video(const VideoDetections& video,
                          const PipelineConfig& config) {
  validate(video);
  VideoProposals out;
  for (const FrameDetections& f : video.frames) {
    if (f.boxes.empty()) {
      out.warning = "video '" + video.video_id + "': frame " +
                    std::to_string(f.frame_index) +
                    " has no boxes; no proposals";
      return out;
    }
  }
  for (ScoredPath& p : extract_paths(video, config.link)) {
    out.proposals.push_back({video.video_id, std::move(p.path), p.score});
  }
  return out;
}

std::vector<Proposal> trim_proposals(const std::vector<Proposal>& paths,
                                     const PipelineConfig& config) {
  std::vector<Proposal> out;
  for (const Proposal& p : paths) {
    for (TubePath& seg : trim(p.path, config.trim).segments) {
      const double score = path_score(seg, config.link.lambda0);
      out.push_back({p.video_id, std::move(seg), score});
    }
  }
  return out;
}

VideoProposals propose(const VideoDetections& video,
                       const PipelineConfig& config) {
  VideoProposals out = link_video(video, config);
  if (config.trim_enabled) out.proposals = trim_proposals(out.proposals, config);
  return out;
}

MetricsReport evaluate_proposals(const std::vector<Proposal>& proposals,
                                 const GroundTruthSet& gts,
                                 std::span<const double> thresholds) {
  std::map<std::string, EvaluationItem> items;
  for (const auto& [id, tubes] : gts) {
    items[id].video_id = id;
    items[id].gts = tubes;
  }
  std::size_t unmatched = 0;
  for (const Proposal& p : proposals) {
    auto it = items.find(p.video_id);
    if (it == items.end()) {
      ++unmatched;
      continue;
    }
    it->second.proposals.push_back(p.path);
  }
  std::vector<EvaluationItem> flat;
  for (auto& [id, item] : items) flat.push_back(std::move(item));
  MetricsReport r = evaluate(flat, thresholds);
  r.num_proposals += unmatched;
  return r;
}

PipelineResult run_pipeline(const PipelineConfig& config,
                            const PipelineInputs& inputs, int threads) {
  validate(config);
  std::vector<const VideoDetections*> order;
  for (const VideoDetections& v : inputs.primary) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->video_id < b->video_id;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->video_id == order[i - 1]->video_id) {
      throw std::invalid_argument("duplicate video '" + order[i]->video_id + "'");
    }
  }
  std::map<std::string, const VideoDetections*> secondary;
  for (const VideoDetections& v : inputs.secondary) secondary[v.video_id] = &v;
  if (!inputs.secondary.empty()) {
    for (const auto* v : order) {
      if (secondary.count(v->video_id) == 0) {
        throw std::invalid_argument("second stream has no video '" +
                                    v->video_id + "'");
      }
    }
  }

  std::vector<VideoProposals> per_video(order.size());
  parallel_for(order.size(), threads, [&](std::size_t i) {
    const VideoDetections& v = *order[i];
    if (inputs.secondary.empty()) {
      per_video[i] = propose(v, config);
    } else {
      per_video[i] = propose(fuse_streams(v, *secondary.at(v.video_id)), config);
    }
  });

  PipelineResult out;
  for (VideoProposals& vp : per_video) {
    if (vp.warning) out.warnings.push_back(*vp.warning);
    for (Proposal& p : vp.proposals) out.proposals.push_back(std::move(p));
  }
  if (!inputs.ground_truth.empty()) {
    out.report = evaluate_proposals(out.proposals, inputs.ground_truth,
                                    default_thresholds());
  }
  return out;
}

std::vector<VideoDetections> infer_all(const Model& model,
                                       const std::vector<VideoFeatures>& videos,
                                       int threads) {
  std::vector<const VideoFeatures*> order;
  for (const VideoFeatures& v : videos) order.push_back(&v);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->video_id < b->video_id;
  });
  std::vector<VideoDetections> out(order.size());
  parallel_for(order.size(), threads,
               [&](std::size_t i) { out[i] = infer(model, *order[i]); });
  return out;
}

}  // namespace actube
