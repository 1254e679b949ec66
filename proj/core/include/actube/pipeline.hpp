// End-to-end proposal generation: (optional) two-stream fusion, greedy path
// extraction, trimming and evaluation, parallel over videos with results
// merged in video-id order.

#ifndef ACTUBE_PIPELINE_HPP_
#define ACTUBE_PIPELINE_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "actube/config.hpp"
#include "actube/formats.hpp"
#include "actube/model.hpp"
#include "actube/tube_metrics.hpp"

namespace actube {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions from
// workers are rethrown (the one with the lowest index).
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

struct VideoProposals {
  std::vector<Proposal> proposals;
  std::optional<std::string> warning;
};

// Linked paths of one video; each is trimmed when config.trim_enabled.
// Proposal scores are path scores of the emitted (sub)path.
VideoProposals propose(const VideoDetections& video,
                       const PipelineConfig& config);

// Link-only step: one proposal per extracted full-length path.
VideoProposals link_video(const VideoDetections& video,
                          const PipelineConfig& config);

// Trims already-linked paths.
std::vector<Proposal> trim_proposals(const std::vector<Proposal>& paths,
                                     const PipelineConfig& config);

MetricsReport evaluate_proposals(const std::vector<Proposal>& proposals,
                                 const GroundTruthSet& gts,
                                 std::span<const double> thresholds);

struct PipelineInputs {
  std::vector<VideoDetections> primary;
  // Optional second stream, fused per video with `primary`.
  std::vector<VideoDetections> secondary;
  GroundTruthSet ground_truth;
};

struct PipelineResult {
  std::vector<Proposal> proposals;           // sorted by video id
  std::optional<MetricsReport> report;       // when ground truth is given
  std::vector<std::string> warnings;
};

PipelineResult run_pipeline(const PipelineConfig& config,
                            const PipelineInputs& inputs, int threads = 1);

// Inference for every video, in video-id order.
std::vector<VideoDetections> infer_all(const Model& model,
                                       const std::vector<VideoFeatures>& videos,
                                       int threads = 1);

}  // namespace actube

#endif  // ACTUBE_PIPELINE_HPP_
