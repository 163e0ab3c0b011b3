#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "opr/errors.hpp"
#include "opr/eval/metrics.hpp"

namespace {

using namespace opr::eval;

TEST(Metrics, AgreeWithBruteForceOnRandomSets) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 300);
    const auto s = oracle::random_scores(rng, n, trial % 3 == 0);
    EXPECT_NEAR(auc(s), oracle::pairwise_auc(s), 1e-12);
    EXPECT_NEAR(eer(s), oracle::sweep_eer(s), 1e-12);
    EXPECT_NEAR(video_auc(s), oracle::video_mean_auc(s), 1e-12);
  }
}

TEST(Metrics, PerfectSeparation) {
  ScoreSet s;
  for (int i = 0; i < 10; ++i) s.push_back({"n" + std::to_string(i), "r", 0.1 * i, 0});
  for (int i = 0; i < 7; ++i) s.push_back({"p" + std::to_string(i), "f", 2 + i, 1});
  EXPECT_EQ(auc(s), 1.0);
  EXPECT_EQ(eer(s), 0.0);
  for (auto& x : s) x.score = -x.score;
  EXPECT_EQ(auc(s), 0.0);
  EXPECT_EQ(eer(s), 1.0);
}

TEST(Metrics, AllTiedIsChance) {
  ScoreSet s{{"a", "a", 0.5, 0}, {"b", "b", 0.5, 1}, {"c", "c", 0.5, 1}};
  EXPECT_EQ(auc(s), 0.5);
  EXPECT_EQ(eer(s), 0.5);
}

TEST(Metrics, HandWorkedExample) {
  // scores: neg {0.1, 0.4, 0.35}, pos {0.8, 0.4}
  ScoreSet s{{"a", "a", 0.1, 0}, {"b", "b", 0.4, 0}, {"c", "c", 0.35, 0}, {"d", "d", 0.8, 1}, {"e", "e", 0.4, 1}};
  // pairs: 0.8 beats all 3; 0.4 beats 0.1, 0.35, ties 0.4 -> 5.5 / 6
  EXPECT_NEAR(auc(s), 5.5 / 6.0, 1e-15);
  const auto pts = roc_points(s);
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_EQ(pts.front().fpr, 0.0);
  EXPECT_EQ(pts.front().fnr, 1.0);
  EXPECT_EQ(pts.back().fpr, 1.0);
  EXPECT_EQ(pts.back().fnr, 0.0);
}

TEST(Metrics, SingleClassThrows) {
  ScoreSet s{{"a", "a", 0.1, 1}, {"b", "b", 0.2, 1}};
  EXPECT_THROW(auc(s), opr::SingleClassError);
  EXPECT_THROW(eer(s), opr::SingleClassError);
  EXPECT_THROW(auc({}), opr::SingleClassError);
}

TEST(Metrics, VideoMixingLabelsThrows) {
  ScoreSet s{{"a", "v", 0.1, 0}, {"b", "v", 0.2, 1}};
  EXPECT_THROW(video_auc(s), opr::Error);
}

TEST(Metrics, VideoAucAveragesFrames) {
  ScoreSet s{{"a", "r1", 0.9, 0}, {"b", "r1", 0.1, 0},  // mean 0.5
             {"c", "f1", 0.6, 1}, {"d", "f1", 0.6, 1},  // mean 0.6
             {"e", "r2", 0.2, 0}};
  EXPECT_EQ(video_auc(s), 1.0);
  EXPECT_LT(auc(s), 1.0);
}

}  // namespace
