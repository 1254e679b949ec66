#include <atomic>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "actube/pipeline.hpp"
#include "actube/synthetic.hpp"
#include "actube/training.hpp"

namespace actube {
namespace {

VideoDetections single_box_video(const std::string& id, int length) {
  VideoDetections v;
  v.video_id = id;
  for (int t = 0; t < length; ++t) {
    v.frames.push_back({t, {ScoredBox{{0.4, 0.5, 0.2, 0.3}, 0.9, 0.5, 0.5}}});
  }
  return v;
}

GroundTruthTube whole_video_gt(int length) {
  return GroundTruthTube{0, length - 1,
                         std::vector<Box2D>(static_cast<std::size_t>(length),
                                            Box2D{0.4, 0.5, 0.2, 0.3}),
                         "a"};
}

TEST(SyntheticTest, StaticNoiselessVideo) {
  SyntheticSpec spec;
  spec.noise = 0.0;
  spec.length = 12;
  spec.action_end = 11;
  const SyntheticVideo v = generate_synthetic(spec, "s");
  ASSERT_EQ(v.trajectory.size(), 12u);
  for (const Box2D& b : v.trajectory) EXPECT_EQ(b, v.trajectory[0]);
  for (const Box2D& b : v.gt.boxes) EXPECT_EQ(b, spec.start_box);
  EXPECT_EQ(v.features.size(), 12u);
  EXPECT_EQ(v.features[0].size(), 256u);
  EXPECT_EQ(v.oracle.frames.size(), 12u);
}

TEST(SyntheticTest, SameSeedIsBitIdentical) {
  SyntheticOptions o;
  o.untrimmed_fraction = 0.5;
  const auto a = generate_dataset(o, 16, 5, 123);
  const auto b = generate_dataset(o, 16, 5, 123);
  const auto c = generate_dataset(o, 16, 5, 124);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].video_id, b[i].video_id);
    EXPECT_EQ(a[i].features, b[i].features);
    EXPECT_EQ(a[i].oracle, b[i].oracle);
    EXPECT_EQ(a[i].gt, b[i].gt);
  }
  EXPECT_NE(a[0].features, c[0].features);
  EXPECT_EQ(a[3].video_id, "vid0003");
}

TEST(SyntheticTest, GroundTruthFollowsActionSegment) {
  SyntheticSpec spec;
  spec.action_start = 10;
  spec.action_end = 29;
  spec.vx = 0.005;
  const SyntheticVideo v = generate_synthetic(spec, "s");
  EXPECT_EQ(v.gt.start, 10);
  EXPECT_EQ(v.gt.end, 29);
  for (int t = 10; t <= 29; ++t) {
    EXPECT_EQ(v.gt.at_frame(t), v.trajectory[static_cast<std::size_t>(t)]);
  }
}

TEST(SyntheticTest, RenderCoverage) {
  Vector frame(16, 0.0);
  render_box(Box2D{0.5, 0.5, 0.5, 0.5}, 1.0, 4, frame);
  // The central 2x2 pixels are fully covered, the rest untouched.
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const bool inside = r >= 1 && r <= 2 && c >= 1 && c <= 2;
      EXPECT_NEAR(frame[static_cast<std::size_t>(r * 4 + c)], inside ? 1.0 : 0.0, 1e-12);
    }
  }
  Vector half(16, 0.0);
  render_box(Box2D{0.5, 0.5, 0.25, 0.25}, 1.0, 4, half);
  EXPECT_NEAR(half[5], 0.25, 1e-12);
}

TEST(SyntheticTest, MirrorFrameIsInvolution) {
  Vector f(9);
  for (std::size_t i = 0; i < 9; ++i) f[i] = static_cast<double>(i);
  const Vector m = mirror_frame(f, 3);
  EXPECT_EQ(m, (Vector{2, 1, 0, 5, 4, 3, 8, 7, 6}));
  EXPECT_EQ(mirror_frame(m, 3), f);
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelForTest, RethrowsLowestIndexError) {
  try {
    parallel_for(20, 3, [](std::size_t i) {
      if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected an exception";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(PipelineTest, SingleBoxPerFrameGivesTheSolePath) {
  PipelineConfig c;
  PipelineInputs in;
  in.primary = {single_box_video("v", 12)};
  in.ground_truth["v"] = {whole_video_gt(12)};
  const PipelineResult r = run_pipeline(c, in);
  ASSERT_EQ(r.proposals.size(), 1u);
  EXPECT_EQ(r.proposals[0].path.start, 0);
  EXPECT_EQ(r.proposals[0].path.end, 11);
  EXPECT_DOUBLE_EQ(r.report->abo, 1.0);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(PipelineTest, EmptyFrameWarnsAndYieldsNothing) {
  PipelineConfig c;
  PipelineInputs in;
  in.primary = {single_box_video("v", 6)};
  in.primary[0].frames[3].boxes.clear();
  in.ground_truth["v"] = {whole_video_gt(6)};
  const PipelineResult r = run_pipeline(c, in);
  EXPECT_TRUE(r.proposals.empty());
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("frame 3"), std::string::npos);
  EXPECT_EQ(r.report->recall(0.5), 0.0);
  EXPECT_EQ(r.report->recall(0.0), 0.0);
}

TEST(PipelineTest, DuplicateVideoRejected) {
  PipelineInputs in;
  in.primary = {single_box_video("v", 3), single_box_video("v", 3)};
  EXPECT_THROW(run_pipeline(PipelineConfig{}, in), std::invalid_argument);
}

TEST(PipelineTest, SecondStreamIsFused) {
  PipelineConfig c;
  c.trim_enabled = false;
  PipelineInputs in;
  in.primary = {single_box_video("v", 4)};
  in.secondary = {single_box_video("v", 4)};
  EXPECT_EQ(run_pipeline(c, in).proposals.size(), 2u);
  in.secondary[0].video_id = "w";
  EXPECT_THROW(run_pipeline(c, in), std::invalid_argument);
}

TEST(PipelineTest, ThreadCountDoesNotChangeResults) {
  SyntheticOptions o;
  o.untrimmed_fraction = 1.0;
  PipelineInputs in;
  for (const SyntheticVideo& v : generate_dataset(o, 16, 12, 5)) {
    in.primary.push_back(v.oracle);
    in.ground_truth[v.video_id] = {v.gt};
  }
  const PipelineConfig c;
  const PipelineResult one = run_pipeline(c, in, 1);
  const PipelineResult many = run_pipeline(c, in, 4);
  EXPECT_EQ(one.proposals, many.proposals);
  EXPECT_EQ(format_report(*one.report), format_report(*many.report));
}

TEST(PipelineTest, TrimmingHelpsOnUntrimmedVideos) {
  SyntheticOptions o;
  o.untrimmed_fraction = 1.0;
  PipelineInputs in;
  for (const SyntheticVideo& v : generate_dataset(o, 16, 30, 6)) {
    in.primary.push_back(v.oracle);
    in.ground_truth[v.video_id] = {v.gt};
  }
  PipelineConfig c;
  const double trimmed = run_pipeline(c, in).report->recall(0.5);
  c.trim_enabled = false;
  const double untrimmed = run_pipeline(c, in).report->recall(0.5);
  EXPECT_GT(trimmed, untrimmed);
}

TEST(TrainingTest, DeterministicAndDecreasing) {
  PipelineConfig c;
  c.grid = GridShape{3, 1};
  c.train.epochs = 4;
  c.train.batch_size = 8;
  c.train.learning_rate = 1e-3;
  c.synthetic.length = 12;
  std::vector<TrainingVideo> videos;
  for (const SyntheticVideo& v : generate_dataset(c.synthetic, 16, 6, 2)) {
    videos.push_back(to_training_video(v));
  }
  std::vector<double> losses;
  const Model a = train(videos, c, [&](const EpochStats& s) { losses.push_back(s.mean_loss); });
  const Model b = train(videos, c);
  EXPECT_EQ(a, b);
  ASSERT_EQ(losses.size(), 4u);
  EXPECT_LT(losses.back(), losses.front());
}

TEST(TrainingTest, RecurrentHeadsTrain) {
  for (HeadKind head : {HeadKind::kLstm, HeadKind::kRnn}) {
    PipelineConfig c;
    c.grid = GridShape{2, 1};
    c.model.head = head;
    c.model.hidden = 6;
    c.train.epochs = 3;
    c.train.batch_size = 2;
    c.train.sequence_length = 4;
    c.train.learning_rate = 1e-2;
    c.model.feature_side = 8;
    c.synthetic.length = 8;
    std::vector<TrainingVideo> videos;
    for (const SyntheticVideo& v : generate_dataset(c.synthetic, 8, 3, 4)) {
      videos.push_back(to_training_video(v));
    }
    std::vector<double> losses;
    const Model m = train(videos, c, [&](const EpochStats& s) { losses.push_back(s.mean_loss); });
    EXPECT_EQ(m.head, head);
    EXPECT_LT(losses.back(), losses.front()) << to_string(head);
    const VideoDetections d = infer(m, VideoFeatures{"x", videos[0].features});
    EXPECT_EQ(d.frames.size(), 8u);
    EXPECT_EQ(d.frames[0].boxes.size(), 4u);
  }
}

}  // namespace
}  // namespace actube
