#include <set>

#include <gtest/gtest.h>

#include "opr/errors.hpp"
#include "opr/labels.hpp"

namespace {

using namespace opr::labels;

TEST(Labels, TripletTableIsCumulative) {
  EXPECT_EQ(organization_variant(AnchorKind::Real, Organization::R2B2D), (AttributeLabel{0, 0, 0}));
  EXPECT_EQ(organization_variant(AnchorKind::Sbi, Organization::R2B2D), (AttributeLabel{1, 0, 0}));
  EXPECT_EQ(organization_variant(AnchorKind::Cbi, Organization::R2B2D), (AttributeLabel{1, 1, 0}));
  EXPECT_EQ(organization_variant(AnchorKind::Deepfake, Organization::R2B2D), (AttributeLabel{1, 1, 1}));
  for (AnchorKind k : kAllAnchors) {
    EXPECT_EQ(progressive_rank(organization_variant(k, Organization::R2B2D)), anchor_index(k));
  }
}

TEST(Labels, MultiLabelSharesTheTable) {
  for (AnchorKind k : kAllAnchors) {
    EXPECT_EQ(label_for(k, StrategyKind::MultiLabel).values, label_for(k, StrategyKind::TripletBinary).values);
  }
}

TEST(Labels, MultiClassIsOneHotUnderPermutation) {
  const ClassPermutation perm{2, 0, 3, 1};
  std::set<int> hot;
  for (AnchorKind k : kAllAnchors) {
    const auto r = label_for(k, StrategyKind::MultiClass, Organization::R2B2D, perm);
    ASSERT_EQ(r.values.size(), 4u);
    double sum = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      sum += r.values[i];
      if (r.values[i] == 1.0) hot.insert(static_cast<int>(i));
    }
    EXPECT_EQ(sum, 1.0);
    EXPECT_EQ(r.values[static_cast<std::size_t>(perm[static_cast<std::size_t>(anchor_index(k))])], 1.0);
  }
  EXPECT_EQ(hot.size(), 4u);
  EXPECT_THROW(label_for(AnchorKind::Real, StrategyKind::MultiClass, Organization::R2B2D, {0, 0, 1, 2}),
               opr::ConfigError);
}

TEST(Labels, DetectionLabels) {
  EXPECT_EQ(detection_label(AnchorKind::Real).y, 0);
  EXPECT_EQ(detection_label(AnchorKind::Sbi).y, 1);
  EXPECT_EQ(detection_label(AnchorKind::Cbi).y, 1);
  EXPECT_EQ(detection_label(AnchorKind::Deepfake).y, 1);
}

TEST(Labels, AdjacencyUnderDefaultOrganization) {
  EXPECT_TRUE(adjacency_check(AnchorKind::Real, AnchorKind::Sbi));
  EXPECT_TRUE(adjacency_check(AnchorKind::Cbi, AnchorKind::Sbi));
  EXPECT_TRUE(adjacency_check(AnchorKind::Cbi, AnchorKind::Deepfake));
  EXPECT_FALSE(adjacency_check(AnchorKind::Real, AnchorKind::Cbi));
  EXPECT_FALSE(adjacency_check(AnchorKind::Real, AnchorKind::Deepfake));
  EXPECT_FALSE(adjacency_check(AnchorKind::Sbi, AnchorKind::Deepfake));
  EXPECT_FALSE(adjacency_check(AnchorKind::Sbi, AnchorKind::Sbi));
  const auto chain = transition_chain(Organization::R2B2D);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain[0], std::make_pair(AnchorKind::Real, AnchorKind::Sbi));
  EXPECT_EQ(chain[1], std::make_pair(AnchorKind::Sbi, AnchorKind::Cbi));
  EXPECT_EQ(chain[2], std::make_pair(AnchorKind::Cbi, AnchorKind::Deepfake));
}

TEST(Labels, AlternativeOrganizations) {
  // R2D2B: real -> deepfake -> SBI -> CBI
  const auto r2d2b = transition_chain(Organization::R2D2B);
  ASSERT_EQ(r2d2b.size(), 3u);
  EXPECT_EQ(r2d2b[0], std::make_pair(AnchorKind::Real, AnchorKind::Deepfake));
  EXPECT_EQ(r2d2b[1], std::make_pair(AnchorKind::Deepfake, AnchorKind::Sbi));
  EXPECT_EQ(r2d2b[2], std::make_pair(AnchorKind::Sbi, AnchorKind::Cbi));
  // Surround: every fake one step from real, none adjacent to each other
  const auto sur = adjacent_pairs(Organization::Surround);
  ASSERT_EQ(sur.size(), 3u);
  for (const auto& [a, b] : sur) EXPECT_EQ(a, AnchorKind::Real) << to_string(b);
  EXPECT_FALSE(adjacency_check(AnchorKind::Sbi, AnchorKind::Cbi, Organization::Surround));
}

TEST(Labels, StringRoundTrips) {
  for (AnchorKind k : kAllAnchors) EXPECT_EQ(anchor_from_string(to_string(k)), k);
  for (auto s : {StrategyKind::TripletBinary, StrategyKind::MultiLabel, StrategyKind::MultiClass}) {
    EXPECT_EQ(strategy_from_string(to_string(s)), s);
  }
  for (auto o : {Organization::R2B2D, Organization::R2D2B, Organization::Surround}) {
    EXPECT_EQ(organization_from_string(to_string(o)), o);
  }
  EXPECT_THROW(organization_from_string("r2b2d"), opr::ConfigError);
  EXPECT_THROW(anchor_from_index(4), opr::Error);
}

TEST(Labels, TableJson) {
  const auto j = label_table_json(StrategyKind::TripletBinary, Organization::R2B2D);
  EXPECT_EQ(j["labels"]["cbi"], (std::vector<double>{1, 1, 0}));
  EXPECT_EQ(j["detection"]["real"], 0);
  EXPECT_EQ(j["organization"], "R2B2D");
}

}  // namespace
