#include <cmath>
#include <limits>
#include <stdexcept>

#include <gtest/gtest.h>

#include "actube/geometry.hpp"
#include "actube/rng.hpp"
#include "oracles.hpp"

namespace actube {
namespace {

TEST(IouTest, IdenticalBoxes) {
  const Box2D b{0.4, 0.6, 0.3, 0.2};
  EXPECT_DOUBLE_EQ(iou(b, b), 1.0);
}

TEST(IouTest, DisjointBoxes) {
  EXPECT_EQ(iou(Box2D{0.2, 0.2, 0.2, 0.2}, Box2D{0.8, 0.8, 0.2, 0.2}), 0.0);
}

TEST(IouTest, QuarterOverlapIsOneSeventh) {
  const Box2D a{0.25, 0.25, 0.5, 0.5};
  const Box2D b{0.5, 0.5, 0.5, 0.5};
  EXPECT_NEAR(iou(a, b), 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(oracle::raster_iou(a, b), 1.0 / 7.0, 1e-3);
}

TEST(IouTest, ZeroAreaBoxesGiveZero) {
  EXPECT_EQ(iou(Box2D{0.5, 0.5, 0.0, 0.0}, Box2D{0.5, 0.5, 0.0, 0.0}), 0.0);
}

TEST(IouTest, SymmetricAndBounded) {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Box2D a = oracle::random_box(rng, 0.0, 1.0);
    const Box2D b = oracle::random_box(rng, 0.0, 1.0);
    const double v = iou(a, b);
    EXPECT_EQ(v, iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(IouTest, MatchesRasterOracleOnRandomBoxes) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const Box2D a = oracle::random_box(rng, 0.1, 0.8);
    const Box2D b = oracle::random_box(rng, 0.1, 0.8);
    EXPECT_NEAR(iou(a, b), oracle::raster_iou(a, b, 600), 1e-2) << i;
    EXPECT_NEAR(iou(a, b), oracle::exact_iou(a, b), 1e-12) << i;
  }
}

TEST(IouTest, BoxesAreClippedToTheImage) {
  // Half of `a` lies outside the image; only the visible half counts.
  const Box2D a{0.0, 0.5, 0.4, 0.4};
  const Box2D b{0.1, 0.5, 0.2, 0.4};
  EXPECT_NEAR(iou(a, b), 1.0, 1e-12);
}

TEST(MirrorTest, FixedPointAndFlip) {
  EXPECT_DOUBLE_EQ(mirror_box(Box2D{0.5, 0.3, 0.2, 0.1}).x, 0.5);
  const Box2D m = mirror_box(Box2D{0.2, 0.3, 0.2, 0.1});
  EXPECT_DOUBLE_EQ(m.x, 0.8);
  EXPECT_DOUBLE_EQ(m.y, 0.3);
  EXPECT_DOUBLE_EQ(m.w, 0.2);
  EXPECT_DOUBLE_EQ(m.h, 0.1);
}

TEST(MirrorTest, InvolutionAndScoresKept) {
  const ScoredBox b{{0.3, 0.4, 0.1, 0.2}, 0.7, 0.6, 0.5};
  const ScoredBox m = mirror_box(b);
  EXPECT_EQ(m.conf, 0.7);
  EXPECT_EQ(m.ac, 0.6);
  EXPECT_EQ(m.bg, 0.5);
  EXPECT_NEAR(mirror_box(m).box.x, 0.3, 1e-15);
}

TEST(Box2DTest, MakeClampsAndRejectsNonFinite) {
  const Box2D b = Box2D::make(1.2, -0.1, 0.5, 2.0);
  EXPECT_EQ(b.x, 1.0);
  EXPECT_EQ(b.y, 0.0);
  EXPECT_EQ(b.h, 1.0);
  EXPECT_THROW(Box2D::make(std::nan(""), 0.5, 0.1, 0.1), std::invalid_argument);
  EXPECT_THROW(Box2D::make(0.5, std::numeric_limits<double>::infinity(), 0.1, 0.1),
               std::invalid_argument);
}

TEST(ValidateTest, RejectsBrokenInvariants) {
  EXPECT_THROW(validate(Box2D{0.5, 0.5, -0.1, 0.1}), std::invalid_argument);
  TubePath p;
  p.start = 2;
  p.end = 4;
  p.boxes.resize(2);
  EXPECT_THROW(validate(p), std::invalid_argument);
  p.boxes.resize(3);
  EXPECT_NO_THROW(validate(p));

  VideoDetections v;
  v.video_id = "v";
  v.frames.push_back({0, {}});
  v.frames.push_back({2, {}});
  EXPECT_THROW(validate(v), std::invalid_argument);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng c(5);
  for (int i = 0; i < 1000; ++i) {
    const double u = c.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const int k = c.uniform_int(-2, 3);
    EXPECT_GE(k, -2);
    EXPECT_LE(k, 3);
  }
}

}  // namespace
}  // namespace actube
