#include <cmath>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "opr/data/manifest.hpp"
#include "opr/errors.hpp"
#include "opr/synth/quad.hpp"
#include "opr/train/trainer.hpp"
#include "test_data.hpp"

namespace {

using namespace opr;
using train::RunConfig;
using train::Trainer;
using train::Variant;

RunConfig tiny(Variant v = Variant::Full) {
  RunConfig c;
  c.backbone.input_size = 16;
  c.backbone.channels = {4, 4};
  c.backbone.toy_mode = true;
  c.variant = v;
  c.batch_quads = 3;
  c.epochs = 2;
  c.warmup_epochs = 1;
  c.learning_rate = 1e-3;
  c.seed = 5;
  c.augment.enabled = true;
  return c;
}

const std::vector<synth::AlignedQuad>& quads() {
  static const auto q = [] {
    const auto records = data::load_manifest(testdata::small_desk().manifest);
    return synth::build_quads(records, data::Split::Train, 2, {});
  }();
  return q;
}

std::vector<double> flat_params(Trainer& t) {
  std::vector<double> out;
  for (const nn::Parameter* p : t.model().parameters())
    out.insert(out.end(), p->value.values().begin(), p->value.values().end());
  return out;
}

TEST(RunConfig, JsonRoundTripAndHash) {
  RunConfig c = tiny();
  c.strategy = labels::StrategyKind::MultiClass;
  c.organization = labels::Organization::Surround;
  c.weights.gamma = 0.25;
  const RunConfig back = nlohmann::json(c).get<RunConfig>();
  EXPECT_EQ(nlohmann::json(back).dump(), nlohmann::json(c).dump());
  EXPECT_EQ(train::config_hash(back), train::config_hash(c));
  EXPECT_EQ(train::config_hash(c).size(), 16u);
  RunConfig d = c;
  d.seed = 6;
  EXPECT_NE(train::config_hash(d), train::config_hash(c));
}

TEST(RunConfig, DefaultsAndValidation) {
  const RunConfig c;
  EXPECT_EQ(c.weights.beta, 1.0);
  EXPECT_EQ(c.weights.gamma, 10.0);
  RunConfig bad = tiny();
  bad.batch_quads = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = tiny();
  bad.bridge_alpha_high = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = tiny();
  bad.weights.gamma = -1;
  EXPECT_THROW(bad.validate(), ConfigError);
  for (Variant v : {Variant::Full, Variant::BFOnly, Variant::DFOnly, Variant::VHT})
    EXPECT_EQ(train::variant_from_string(train::to_string(v)), v);
  EXPECT_THROW(train::variant_from_string("nope"), Error);
}

TEST(Variants, AssembleTheRightAnchors) {
  const auto& q = quads().front();
  using K = labels::AnchorKind;
  const auto full = train::assemble_variant_batch(q, tiny(Variant::Full));
  EXPECT_EQ(full.kinds.size(), 4u);
  EXPECT_TRUE(full.attribute_loss && full.transition_loss && full.bridging);
  EXPECT_EQ(full.attribute_targets.size(), 4u);
  const auto vht = train::assemble_variant_batch(q, tiny(Variant::VHT));
  EXPECT_EQ(vht.kinds.size(), 4u);
  EXPECT_FALSE(vht.attribute_loss || vht.transition_loss || vht.bridging);
  EXPECT_TRUE(vht.attribute_targets.empty());
  const auto bf = train::assemble_variant_batch(q, tiny(Variant::BFOnly));
  EXPECT_EQ(bf.kinds, (std::vector<K>{K::Real, K::Sbi, K::Cbi}));
  const auto df = train::assemble_variant_batch(q, tiny(Variant::DFOnly));
  EXPECT_EQ(df.kinds, (std::vector<K>{K::Real, K::Deepfake}));
  for (const auto& v : {full, vht, bf, df}) {
    for (std::size_t i = 0; i < v.kinds.size(); ++i) {
      EXPECT_EQ(v.detection_targets[i], labels::detection_label(v.kinds[i]));
      EXPECT_EQ(cv::norm(v.images[i], q.images[labels::anchor_index(v.kinds[i])], cv::NORM_INF), 0.0);
    }
  }
}

TEST(Variants, BinaryVariantsCarryOnlyDetectionLoss) {
  Trainer t(tiny(Variant::VHT));
  t.train_epoch(quads());
  const auto s = t.train_epoch(quads());
  EXPECT_EQ(s.bridged, 0);
  for (const auto& r : s.steps) {
    EXPECT_EQ(r.loss.l_o, 0.0);
    EXPECT_EQ(r.loss.l_t, 0.0);
    EXPECT_EQ(r.loss.l_overall, r.loss.l_d);
  }
}

TEST(Trainer, BridgingStartsAfterWarmup) {
  RunConfig c = tiny();
  c.warmup_epochs = 1;
  Trainer t(c);
  const auto first = t.train_epoch(quads());
  const auto second = t.train_epoch(quads());
  EXPECT_EQ(first.bridged, 0);
  EXPECT_EQ(second.bridged, static_cast<int>(quads().size()) * c.bridge_pairs_per_quad);
}

TEST(Trainer, OverallCombinesTheWeightedTerms) {
  RunConfig c = tiny();
  c.weights.beta = 0.5;
  c.weights.gamma = 3.0;
  Trainer t(c);
  for (const auto& r : t.train_epoch(quads()).steps) {
    EXPECT_NEAR(r.loss.l_overall, r.loss.l_d + 0.5 * r.loss.l_o + 3.0 * r.loss.l_t, 1e-12);
    EXPECT_GT(r.loss.l_o, 0.0);
    EXPECT_GT(r.loss.l_t, 0.0);
  }
}

TEST(Trainer, ZeroLearningRateLeavesParametersAlone) {
  RunConfig c = tiny();
  c.learning_rate = 0.0;
  Trainer t(c);
  const auto before = flat_params(t);
  t.train_epoch(quads());
  EXPECT_EQ(flat_params(t), before);
  EXPECT_EQ(t.step(), static_cast<long>((quads().size() + 2) / 3));
}

TEST(Trainer, SameSeedSameRun) {
  Trainer a(tiny()), b(tiny());
  for (int e = 0; e < 2; ++e) {
    const auto sa = a.train_epoch(quads());
    const auto sb = b.train_epoch(quads());
    for (std::size_t i = 0; i < sa.steps.size(); ++i) EXPECT_EQ(sa.steps[i].loss.l_overall, sb.steps[i].loss.l_overall);
  }
  EXPECT_EQ(flat_params(a), flat_params(b));
}

TEST(Trainer, CheckpointReplayIsBitExact) {
  const auto dir = testdata::scratch_dir("trainer_ckpt");
  Trainer straight(tiny());
  straight.train_epoch(quads());
  straight.save_checkpoint(dir / "e1.json");
  straight.train_epoch(quads());

  auto resumed = Trainer::restore(dir / "e1.json", tiny());
  EXPECT_EQ(resumed->epoch(), 1);
  resumed->train_epoch(quads());
  EXPECT_EQ(resumed->step(), straight.step());
  EXPECT_EQ(flat_params(*resumed), flat_params(straight));
}

TEST(Trainer, RestoreRejectsMismatchAndVersion) {
  const auto dir = testdata::scratch_dir("trainer_bad_ckpt");
  Trainer t(tiny());
  t.save_checkpoint(dir / "c.json");
  RunConfig other = tiny();
  other.strategy = labels::StrategyKind::MultiLabel;
  EXPECT_THROW(Trainer::restore(dir / "c.json", other), CheckpointMismatchError);
  other = tiny();
  other.backbone.channels = {4, 8};
  EXPECT_THROW(Trainer::restore(dir / "c.json", other), CheckpointMismatchError);

  nlohmann::json j;
  std::ifstream(dir / "c.json") >> j;
  j["version"] = 99;
  std::ofstream(dir / "v.json") << j.dump();
  EXPECT_THROW(Trainer::restore(dir / "v.json"), CheckpointVersionError);
  std::ofstream(dir / "junk.json") << "{not json";
  EXPECT_THROW(Trainer::restore(dir / "junk.json"), CheckpointError);
  EXPECT_THROW(Trainer::restore(dir / "absent.json"), CheckpointError);
}

TEST(Trainer, NonFiniteLossNamesTheBatch) {
  Trainer t(tiny());
  nn::Parameter* p = t.model().parameters().front();
  p->value.values()[0] = std::nan("");
  try {
    t.train_epoch(quads());
    FAIL() << "expected NanLossError";
  } catch (const NanLossError& e) {
    EXPECT_FALSE(e.batch_frame_ids().empty());
    EXPECT_NE(std::string(e.what()).find(e.batch_frame_ids().front()), std::string::npos);
  }
  EXPECT_EQ(t.step(), 0);
}

TEST(TrainLog, WritesJsonlAndCsv) {
  const auto dir = testdata::scratch_dir("trainlog");
  {
    train::TrainLog log(dir / "s.jsonl", dir / "e.csv");
    Trainer t(tiny());
    t.train_epoch(quads(), &log);
  }
  std::ifstream in(dir / "s.jsonl");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("l_overall"));
    EXPECT_EQ(j.at("gamma").get<double>(), 10.0);
    ++n;
  }
  EXPECT_EQ(n, static_cast<int>((quads().size() + 2) / 3));
  std::ifstream csv(dir / "e.csv");
  std::getline(csv, line);
  EXPECT_EQ(line, "epoch,steps,bridged,l_d,l_o,l_t,l_overall");
}

}  // namespace
