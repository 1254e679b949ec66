// Proposal quality against ground-truth tubes: tube overlap (OV), average
// best overlap (ABO), its per-class mean (MABO) and recall versus overlap
// threshold.

#ifndef ACTUBE_TUBE_METRICS_HPP_
#define ACTUBE_TUBE_METRICS_HPP_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actube/geometry.hpp"

namespace actube {

// Sum of per-frame IoU over the temporal intersection divided by the number
// of frames in the temporal union (both inclusive).
double tube_overlap(const TubePath& d, const GroundTruthTube& g);

// Best overlap of `g` over a proposal set; -1 when the set is empty, which
// counts as undetected at every threshold (and as 0 in ABO).
double best_overlap(std::span<const TubePath> proposals,
                    const GroundTruthTube& g);

// Mean over ground truths of the best proposal overlap. Throws on an empty
// ground-truth set.
double abo(std::span<const TubePath> proposals,
           std::span<const GroundTruthTube> gts);

struct ClassAbo {
  std::map<std::string, double> abo_per_class;
  double mabo = 0.0;
};

// Ground truths are grouped by class_label; MABO is the unweighted mean over
// classes.
ClassAbo mabo(std::span<const TubePath> proposals,
              std::span<const GroundTruthTube> gts);

// Fraction of ground truths with best overlap >= eta, for each eta.
std::vector<std::pair<double, double>> recall_curve(
    std::span<const TubePath> proposals, std::span<const GroundTruthTube> gts,
    std::span<const double> thresholds);

// 0, 0.05, ..., 1.0
std::vector<double> default_thresholds();

// One video's proposals and ground truths. Overlaps are only taken within a
// video.
struct EvaluationItem {
  std::string video_id;
  std::vector<TubePath> proposals;
  std::vector<GroundTruthTube> gts;
};

struct MetricsReport {
  double abo = 0.0;
  std::map<std::string, double> abo_per_class;
  double mabo = 0.0;
  std::map<double, double> recall_at;
  std::vector<std::pair<double, double>> curve;
  std::size_t num_proposals = 0;
  std::size_t num_ground_truth = 0;

  double recall(double eta) const { return recall_at.at(eta); }
};

// Aggregates over videos: every ground truth contributes its best overlap
// among the proposals of its own video.
MetricsReport evaluate(std::span<const EvaluationItem> items,
                       std::span<const double> thresholds);

}  // namespace actube

#endif  // ACTUBE_TUBE_METRICS_HPP_
