#include "actube/tube_metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace actube {
namespace {

struct Scored {
  const GroundTruthTube* gt;
  double best;
};

MetricsReport summarize(const std::vector<Scored>& scored,
                        std::size_t num_proposals,
                        std::span<const double> thresholds) {
  if (scored.empty()) {
    throw std::invalid_argument("metrics: empty ground-truth set");
  }
  for (double eta : thresholds) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("metrics: thresholds must lie in [0, 1]");
    }
  }
  MetricsReport r;
  r.num_proposals = num_proposals;
  r.num_ground_truth = scored.size();

  std::map<std::string, std::pair<double, std::size_t>> per_class;
  double total = 0.0;
  for (const Scored& s : scored) {
    const double ov = std::max(s.best, 0.0);
    total += ov;
    auto& [sum, count] = per_class[s.gt->class_label];
    sum += ov;
    ++count;
  }
  r.abo = total / static_cast<double>(scored.size());
  double class_sum = 0.0;
  for (const auto& [label, acc] : per_class) {
    const double v = acc.first / static_cast<double>(acc.second);
    r.abo_per_class[label] = v;
    class_sum += v;
  }
  r.mabo = class_sum / static_cast<double>(per_class.size());

  for (double eta : thresholds) {
    std::size_t hit = 0;
    for (const Scored& s : scored) {
      if (s.best >= 0.0 && s.best >= eta) ++hit;
    }
    const double rec =
        static_cast<double>(hit) / static_cast<double>(scored.size());
    r.curve.emplace_back(eta, rec);
    r.recall_at[eta] = rec;
  }
  return r;
}

}  // namespace

double tube_overlap(const TubePath& d, const GroundTruthTube& g) {
  const int lo = std::max(d.start, g.start);
  const int hi = std::min(d.end, g.end);
  if (lo > hi) return 0.0;
  const int uni = std::max(d.end, g.end) - std::min(d.start, g.start) + 1;
  double sum = 0.0;
  for (int t = lo; t <= hi; ++t) sum += iou(d.at_frame(t).box, g.at_frame(t));
  return sum / static_cast<double>(uni);
}

double best_overlap(std::span<const TubePath> proposals,
                    const GroundTruthTube& g) {
  double best = -1.0;
  for (const TubePath& d : proposals) best = std::max(best, tube_overlap(d, g));
  return best;
}

double abo(std::span<const TubePath> proposals,
           std::span<const GroundTruthTube> gts) {
  if (gts.empty()) throw std::invalid_argument("abo: empty ground-truth set");
  double total = 0.0;
  for (const GroundTruthTube& g : gts) {
    total += std::max(best_overlap(proposals, g), 0.0);
  }
  return total / static_cast<double>(gts.size());
}

ClassAbo mabo(std::span<const TubePath> proposals,
              std::span<const GroundTruthTube> gts) {
  std::vector<Scored> scored;
  for (const GroundTruthTube& g : gts) {
    scored.push_back({&g, best_overlap(proposals, g)});
  }
  const MetricsReport r = summarize(scored, proposals.size(), {});
  return ClassAbo{r.abo_per_class, r.mabo};
}

std::vector<std::pair<double, double>> recall_curve(
    std::span<const TubePath> proposals, std::span<const GroundTruthTube> gts,
    std::span<const double> thresholds) {
  std::vector<Scored> scored;
  for (const GroundTruthTube& g : gts) {
    scored.push_back({&g, best_overlap(proposals, g)});
  }
  return summarize(scored, proposals.size(), thresholds).curve;
}

std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 20; ++i) out.push_back(i / 20.0);
  return out;
}

MetricsReport evaluate(std::span<const EvaluationItem> items,
                       std::span<const double> thresholds) {
  std::vector<Scored> scored;
  std::size_t num_proposals = 0;
  for (const EvaluationItem& item : items) {
    num_proposals += item.proposals.size();
    for (const GroundTruthTube& g : item.gts) {
      scored.push_back({&g, best_overlap(item.proposals, g)});
    }
  }
  return summarize(scored, num_proposals, thresholds);
}

}  // namespace actube
