#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "opr/errors.hpp"
#include "opr/eval/latent.hpp"
#include "test_data.hpp"

namespace {

using namespace opr::eval;
using opr::labels::AnchorKind;

EmbeddingDump random_dump(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> g(0, 1);
  EmbeddingDump dump{d, {}};
  for (int i = 0; i < n; ++i) {
    EmbeddingItem it{"i" + std::to_string(i), opr::labels::anchor_from_index(i % 4), {}};
    for (int k = 0; k < d; ++k) it.vector.push_back(g(rng) + 0.5 * (i % 4));
    dump.items.push_back(it);
  }
  return dump;
}

std::vector<std::vector<std::vector<double>>> jitter(const EmbeddingDump& dump, std::mt19937_64& rng, int reps) {
  std::normal_distribution<double> g(0, 0.3);
  std::vector<std::vector<std::vector<double>>> out;
  for (const auto& it : dump.items) {
    std::vector<std::vector<double>> ps;
    for (int r = 0; r < reps; ++r) {
      auto v = it.vector;
      for (double& x : v) x += g(rng);
      ps.push_back(v);
    }
    out.push_back(ps);
  }
  return out;
}

TEST(Latent, IdenticalPerturbationsGiveZero) {
  std::mt19937_64 rng(1);
  const auto dump = random_dump(rng, 20, 3);
  std::vector<std::vector<std::vector<double>>> same;
  for (const auto& it : dump.items) same.push_back({it.vector, it.vector});
  EXPECT_EQ(mpd(dump, same), 0.0);
}

TEST(Latent, TranslationInvariance) {
  std::mt19937_64 rng(2);
  auto dump = random_dump(rng, 30, 4);
  auto pert = jitter(dump, rng, 3);
  const double before = mpd(dump, pert);
  const std::vector<double> t{3.0, -7.5, 100.0, 0.25};
  for (auto& it : dump.items)
    for (std::size_t k = 0; k < 4; ++k) it.vector[k] += t[k];
  for (auto& ps : pert)
    for (auto& v : ps)
      for (std::size_t k = 0; k < 4; ++k) v[k] += t[k];
  EXPECT_NEAR(mpd(dump, pert), before, 1e-12);
}

TEST(Latent, TwoDimensionalClosedForm) {
  // Perturbed points on the ellipse (o + r s cos t, o + r s sin t) sit at a
  // standardized distance of exactly r.
  const std::vector<double> o{1.5, -2.0}, s{0.7, 2.5};
  std::vector<std::vector<double>> ps;
  const double r = 1.75;
  for (int i = 0; i < 12; ++i) {
    const double t = 0.5236 * i + 0.1;
    ps.push_back({o[0] + r * s[0] * std::cos(t), o[1] + r * s[1] * std::sin(t)});
  }
  EXPECT_NEAR(perturbed_distance(o, ps, s), r, 1e-12);
  EXPECT_NEAR(perturbed_distance(o, ps, s), oracle::pd_sum(o, ps, s), 1e-12);
}

TEST(Latent, MatchesSummationOracle) {
  std::mt19937_64 rng(3);
  const auto dump = random_dump(rng, 25, 2);
  const auto pert = jitter(dump, rng, 4);
  const auto s = dimension_std(dump);
  double total = 0;
  for (std::size_t k = 0; k < dump.items.size(); ++k) total += oracle::pd_sum(dump.items[k].vector, pert[k], s);
  EXPECT_NEAR(mpd(dump, pert), total / static_cast<double>(dump.items.size()), 1e-12);
}

TEST(Latent, PrintedFormDiffersFromDistance) {
  const std::vector<double> o{1.0}, s{1.0};
  EXPECT_NEAR(perturbed_distance(o, {{1.0}}, s, PdForm::Printed), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(perturbed_distance(o, {{1.0}}, s, PdForm::Difference), 0.0);
}

TEST(Latent, ZeroStdThrows) {
  EmbeddingDump dump{2, {{"a", AnchorKind::Real, {1, 2}}, {"b", AnchorKind::Sbi, {1, 5}}}};
  EXPECT_THROW(mpd(dump, {{{1, 2}}, {{1, 5}}}), opr::ZeroStdError);
  EXPECT_THROW(dimension_std({2, {}}), opr::EmptyDumpError);
}

TEST(Latent, DimensionStdIsPopulationStd) {
  EmbeddingDump dump{1, {{"a", AnchorKind::Real, {1}}, {"b", AnchorKind::Real, {3}}}};
  EXPECT_EQ(dimension_std(dump)[0], 1.0);
}

TEST(Latent, Spearman) {
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0, 1e-15);
  EXPECT_NEAR(spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0, 1e-15);
  // ties get average ranks: ranks a = (1, 2.5, 2.5, 4), b = (1, 2, 3, 4)
  EXPECT_NEAR(spearman({1, 2, 2, 3}, {1, 2, 3, 4}), 4.5 / std::sqrt(4.5 * 5.0), 1e-12);
  EXPECT_THROW(spearman({1, 1, 1}, {1, 2, 3}), opr::DegenerateOrderingError);
}

TEST(Latent, OrderingStatistic) {
  EmbeddingDump ordered{2, {}};
  for (int i = 0; i < 40; ++i) {
    const int k = i % 4;
    ordered.items.push_back({"i" + std::to_string(i), opr::labels::anchor_from_index(k), {k + 0.01 * i, 1.0 - 0.02 * k}});
  }
  EXPECT_GT(ordering_statistic(ordered), 0.95);
  EmbeddingDump reversed = ordered;
  // real and deepfake stay put, SBI and CBI swap places
  for (auto& it : reversed.items) {
    if (it.kind == AnchorKind::Sbi) it.vector[0] += 1;
    else if (it.kind == AnchorKind::Cbi) it.vector[0] -= 1;
  }
  EXPECT_LT(ordering_statistic(reversed), ordering_statistic(ordered));
  EmbeddingDump one{2, {{"a", AnchorKind::Real, {0, 0}}, {"b", AnchorKind::Real, {1, 1}}}};
  EXPECT_THROW(ordering_statistic(one), opr::DegenerateOrderingError);
}

TEST(Latent, DumpRoundTrip) {
  std::mt19937_64 rng(4);
  const auto dump = random_dump(rng, 9, 3);
  const auto path = testdata::scratch_dir("dump") / "e.csv";
  save_dump(dump, path);
  const auto back = load_dump(path);
  ASSERT_EQ(back.dim, 3);
  ASSERT_EQ(back.items.size(), dump.items.size());
  for (std::size_t i = 0; i < dump.items.size(); ++i) {
    EXPECT_EQ(back.items[i].item_id, dump.items[i].item_id);
    EXPECT_EQ(back.items[i].kind, dump.items[i].kind);
    EXPECT_EQ(back.items[i].vector, dump.items[i].vector);
  }
}

TEST(Latent, RejectsNonFinite) {
  EmbeddingDump dump{1, {{"a", AnchorKind::Real, {std::nan("")}}}};
  EXPECT_THROW(validate_dump(dump), opr::Error);
}

}  // namespace
