#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

#include <gtest/gtest.h>

#include "actube/path_linker.hpp"
#include "oracles.hpp"

namespace actube {
namespace {

ScoredBox box_with_conf(double conf, double x = 0.5) {
  return ScoredBox{{x, 0.5, 0.2, 0.2}, conf, 0.0, 0.0};
}

VideoDetections video_of(std::vector<std::vector<ScoredBox>> frames) {
  VideoDetections v;
  v.video_id = "v";
  for (std::size_t t = 0; t < frames.size(); ++t) {
    v.frames.push_back({static_cast<int>(t), std::move(frames[t])});
  }
  return v;
}

TEST(PathScoreTest, SingleFrame) {
  TubePath p{3, 3, {box_with_conf(0.7)}};
  EXPECT_DOUBLE_EQ(path_score(p, 1.0), 0.7);
}

TEST(PathScoreTest, IdenticalBoxes) {
  TubePath p{0, 1, {box_with_conf(0.5), box_with_conf(0.5)}};
  EXPECT_DOUBLE_EQ(path_score(p, 2.0), 3.0);
}

TEST(PathScoreTest, ZeroLambdaSumsConfidences) {
  TubePath p{0, 2, {box_with_conf(0.1, 0.1), box_with_conf(0.4, 0.9),
                    box_with_conf(0.3, 0.5)}};
  EXPECT_DOUBLE_EQ(path_score(p, 0.0), 0.1 + 0.4 + 0.3);
}

TEST(ViterbiTest, OneBoxPerFrame) {
  const VideoDetections v =
      video_of({{box_with_conf(0.1)}, {box_with_conf(0.2, 0.6)}, {box_with_conf(0.3)}});
  const ScoredPath p = viterbi_link(v, LinkConfig{});
  EXPECT_EQ(p.path.start, 0);
  EXPECT_EQ(p.path.end, 2);
  EXPECT_EQ(p.box_indices, (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_DOUBLE_EQ(p.score, path_score(p.path, 1.0));
}

TEST(ViterbiTest, ZeroLambdaTieBreaksToLowestIndex) {
  const VideoDetections v = video_of({{box_with_conf(0.9), box_with_conf(0.1)},
                                      {box_with_conf(0.2), box_with_conf(0.8)},
                                      {box_with_conf(0.5), box_with_conf(0.5)}});
  const ScoredPath p = viterbi_link(v, LinkConfig{0.0, 100});
  EXPECT_EQ(p.box_indices, (std::vector<std::size_t>{0, 1, 0}));
  EXPECT_NEAR(p.score, 2.2, 1e-12);
}

TEST(ViterbiTest, OverlapOutweighsConfidence) {
  // The confident box in frame 1 jumps away; with a large lambda the
  // consistent box wins.
  const VideoDetections v =
      video_of({{box_with_conf(0.5, 0.2)},
                {box_with_conf(0.1, 0.2), box_with_conf(0.9, 0.8)},
                {box_with_conf(0.5, 0.2)}});
  EXPECT_EQ(viterbi_link(v, LinkConfig{2.0, 1}).box_indices[1], 0u);
  EXPECT_EQ(viterbi_link(v, LinkConfig{0.0, 1}).box_indices[1], 1u);
}

TEST(ViterbiTest, MatchesEnumeration) {
  Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const VideoDetections v =
        oracle::random_video(rng, rng.uniform_int(1, 6), 4);
    const double lambda0 = rng.uniform(0.0, 3.0);
    const ScoredPath p = viterbi_link(v, LinkConfig{lambda0, 1});
    EXPECT_NEAR(p.score, oracle::enumerate_best_score(v, lambda0), 1e-9) << i;
  }
}

TEST(ViterbiTest, EmptyFrameThrows) {
  const VideoDetections v = video_of({{box_with_conf(0.1)}, {}});
  try {
    viterbi_link(v, LinkConfig{});
    FAIL() << "expected EmptyFrameError";
  } catch (const EmptyFrameError& e) {
    EXPECT_EQ(e.frame(), 1);
  }
}

TEST(ExtractTest, OneBoxPerFrameGivesOnePath) {
  const VideoDetections v =
      video_of({{box_with_conf(0.1)}, {box_with_conf(0.2)}, {box_with_conf(0.3)}});
  EXPECT_EQ(extract_paths(v, LinkConfig{}).size(), 1u);
}

TEST(ExtractTest, MaxPathsCaps) {
  const VideoDetections v = video_of({{box_with_conf(0.1), box_with_conf(0.2)},
                                      {box_with_conf(0.2), box_with_conf(0.3)}});
  EXPECT_EQ(extract_paths(v, LinkConfig{1.0, 1}).size(), 1u);
  EXPECT_EQ(extract_paths(v, LinkConfig{1.0, 5}).size(), 2u);
}

TEST(ExtractTest, EmptyFrameGivesNothing) {
  const VideoDetections v = video_of({{box_with_conf(0.1)}, {}});
  EXPECT_TRUE(extract_paths(v, LinkConfig{}).empty());
}

TEST(ExtractTest, TwoPathsPartitionBoxes) {
  Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    VideoDetections v;
    v.video_id = "v";
    for (int t = 0; t < 4; ++t) {
      v.frames.push_back({t, {oracle::random_scored_box(rng),
                              oracle::random_scored_box(rng)}});
    }
    const auto paths = extract_paths(v, LinkConfig{});
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_NEAR(paths[0].score, oracle::enumerate_best_score(v, 1.0), 1e-9);
    std::set<std::pair<int, std::size_t>> used;
    for (const ScoredPath& p : paths) {
      for (int t = 0; t < 4; ++t) {
        const std::size_t k = p.box_indices[static_cast<std::size_t>(t)];
        EXPECT_TRUE(used.insert({t, k}).second);
        EXPECT_EQ(p.path.boxes[static_cast<std::size_t>(t)],
                  v.frames[static_cast<std::size_t>(t)].boxes[k]);
      }
    }
    EXPECT_EQ(used.size(), 8u);
  }
}

TEST(ExtractTest, ScoresAreRecomputedPathScores) {
  Rng rng(33);
  const VideoDetections v = oracle::random_video(rng, 5, 4);
  for (const ScoredPath& p : extract_paths(v, LinkConfig{})) {
    EXPECT_DOUBLE_EQ(p.score, path_score(p.path, 1.0));
  }
}

TEST(FuseTest, ConcatenatesPerFrame) {
  const VideoDetections a = video_of({{box_with_conf(0.1), box_with_conf(0.2)}});
  const VideoDetections b = video_of(
      {{box_with_conf(0.3), box_with_conf(0.4), box_with_conf(0.5)}});
  const VideoDetections f = fuse_streams(a, b);
  ASSERT_EQ(f.frames[0].boxes.size(), 5u);
  EXPECT_EQ(f.frames[0].boxes[0].conf, 0.1);
  EXPECT_EQ(f.frames[0].boxes[4].conf, 0.5);
}

TEST(FuseTest, EmptyStreamIsIdentity) {
  const VideoDetections a =
      video_of({{box_with_conf(0.1)}, {box_with_conf(0.2), box_with_conf(0.3)}});
  const VideoDetections empty = video_of({{}, {}});
  EXPECT_EQ(fuse_streams(a, empty), a);
}

TEST(FuseTest, MismatchedVideosThrow) {
  const VideoDetections a = video_of({{box_with_conf(0.1)}});
  VideoDetections b = video_of({{box_with_conf(0.1)}, {box_with_conf(0.1)}});
  EXPECT_THROW(fuse_streams(a, b), std::invalid_argument);
  b = a;
  b.video_id = "other";
  EXPECT_THROW(fuse_streams(a, b), std::invalid_argument);
}

}  // namespace
}  // namespace actube
