#include <vector>

#include <benchmark/benchmark.h>

#include "actube/grid_codec.hpp"
#include "actube/neural_head.hpp"
#include "actube/path_linker.hpp"
#include "actube/path_trimmer.hpp"
#include "actube/pipeline.hpp"
#include "actube/rng.hpp"
#include "actube/synthetic.hpp"
#include "actube/tube_metrics.hpp"

namespace actube {
namespace {

VideoDetections random_video(int length, int boxes, std::uint64_t seed) {
  Rng rng(seed);
  VideoDetections v;
  v.video_id = "bench";
  for (int t = 0; t < length; ++t) {
    FrameDetections f{t, {}};
    for (int i = 0; i < boxes; ++i) {
      f.boxes.push_back(ScoredBox{{rng.uniform(), rng.uniform(), rng.uniform(0.05, 0.5),
                                   rng.uniform(0.05, 0.5)},
                                  rng.uniform(), rng.uniform(), rng.uniform()});
    }
    v.frames.push_back(std::move(f));
  }
  return v;
}

void BM_ViterbiLink(benchmark::State& state) {
  const VideoDetections v =
      random_video(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(viterbi_link(v, LinkConfig{}));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ViterbiLink)->Args({50, 98})->Args({200, 98})->Args({50, 196});

void BM_ExtractPaths(benchmark::State& state) {
  const VideoDetections v = random_video(50, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_paths(v, LinkConfig{}));
  }
}
BENCHMARK(BM_ExtractPaths)->Arg(10)->Arg(98)->Unit(benchmark::kMillisecond);

void BM_LossGradient(benchmark::State& state) {
  const GridShape s{7, 2};
  Rng rng(3);
  GridTensor pred(s);
  for (double& v : pred.values) v = rng.uniform(0.05, 1.0);
  const std::vector<Box2D> gt{{0.3, 0.4, 0.2, 0.3}, {0.7, 0.6, 0.3, 0.2}};
  const FrameTarget target = encode_target(gt, pred);
  for (auto _ : state) {
    benchmark::DoNotOptimize(loss_gradient(pred, target, LossWeights{}));
  }
}
BENCHMARK(BM_LossGradient);

void BM_LstmBptt(benchmark::State& state) {
  const auto hidden = static_cast<std::size_t>(state.range(0));
  const GridShape s{7, 2};
  Rng rng(4);
  LstmParams cell(256, hidden);
  init_uniform(cell, rng);
  DenseParams readout(hidden, s);
  init_uniform(readout, rng);
  std::vector<Vector> seq(10, Vector(256));
  for (Vector& x : seq) {
    for (double& v : x) v = rng.uniform();
  }
  const std::vector<Box2D> gt{{0.5, 0.5, 0.3, 0.3}};
  const std::vector<FrameTarget> targets(10, encode_target(gt, GridTensor(s)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bptt(cell, readout, seq, targets, LossWeights{}));
  }
}
BENCHMARK(BM_LstmBptt)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Trim(benchmark::State& state) {
  const VideoDetections v = random_video(static_cast<int>(state.range(0)), 1, 5);
  TubePath p{0, static_cast<int>(state.range(0)) - 1, {}};
  for (const FrameDetections& f : v.frames) p.boxes.push_back(f.boxes[0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trim(p, TrimConfig{}));
  }
}
BENCHMARK(BM_Trim)->Arg(50)->Arg(500);

void BM_Evaluate(benchmark::State& state) {
  SyntheticOptions o;
  o.untrimmed_fraction = 1.0;
  std::vector<EvaluationItem> items;
  for (const SyntheticVideo& sv : generate_dataset(o, 16, 20, 6)) {
    EvaluationItem item{sv.video_id, {}, {sv.gt}};
    for (const ScoredPath& p : extract_paths(sv.oracle, LinkConfig{})) {
      item.proposals.push_back(p.path);
    }
    items.push_back(std::move(item));
  }
  const std::vector<double> thresholds = default_thresholds();
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate(items, thresholds));
  }
}
BENCHMARK(BM_Evaluate)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace actube

BENCHMARK_MAIN();
