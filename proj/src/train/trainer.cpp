#include "opr/train/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "opr/bridging.hpp"
#include "opr/data/image.hpp"
#include "opr/errors.hpp"
#include "opr/nn/ops.hpp"
#include "opr/train/augment.hpp"

namespace opr::train {

using labels::AnchorKind;

VariantQuad assemble_variant_batch(const synth::AlignedQuad& quad, const RunConfig& config) {
  bridging::require_same_frame(quad.frame_ids);
  VariantQuad v;
  v.frame_id = quad.frame_id();
  switch (config.variant) {
    case Variant::Full:
    case Variant::VHT:
      v.kinds.assign(labels::kAllAnchors.begin(), labels::kAllAnchors.end());
      break;
    case Variant::BFOnly:
      v.kinds = {AnchorKind::Real, AnchorKind::Sbi, AnchorKind::Cbi};
      break;
    case Variant::DFOnly:
      v.kinds = {AnchorKind::Real, AnchorKind::Deepfake};
      break;
  }
  const bool full = config.variant == Variant::Full;
  v.attribute_loss = v.transition_loss = v.bridging = full;
  for (AnchorKind k : v.kinds) {
    v.images.push_back(quad.images[static_cast<std::size_t>(labels::anchor_index(k))]);
    v.detection_targets.push_back(labels::detection_label(k));
    if (full) {
      v.attribute_targets.push_back(
          labels::label_for(k, config.strategy, config.organization, config.class_permutation));
    }
  }
  if (config.variant == Variant::BFOnly) {
    for (AnchorKind k : v.kinds) {
      if (k == AnchorKind::Deepfake) throw Error("BF-only batch must not contain deepfake images");
    }
  }
  return v;
}

TrainLog::TrainLog(const std::filesystem::path& jsonl, const std::filesystem::path& csv, bool append) {
  const auto mode = append ? std::ios::app : std::ios::trunc;
  if (!jsonl.empty()) {
    jsonl_.open(jsonl, std::ios::out | mode);
    if (!jsonl_) throw Error("cannot open step log " + jsonl.string());
  }
  if (!csv.empty()) {
    const bool fresh = !append || !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
    csv_.open(csv, std::ios::out | mode);
    if (!csv_) throw Error("cannot open epoch log " + csv.string());
    if (fresh) csv_ << "epoch,steps,bridged,l_d,l_o,l_t,l_overall\n";
  }
}

void TrainLog::step(const StepReport& r, const loss::LossWeights& w) {
  if (!jsonl_.is_open()) return;
  jsonl_ << nlohmann::json{{"epoch", r.epoch},           {"step", r.step},         {"l_d", r.loss.l_d},
                           {"l_o", r.loss.l_o},           {"l_t", r.loss.l_t},      {"l_overall", r.loss.l_overall},
                           {"beta", w.beta},              {"gamma", w.gamma},       {"bridged", r.bridged},
                           {"anchors", r.anchors}}
                .dump()
         << '\n';
  jsonl_.flush();
}

void TrainLog::epoch(const EpochSummary& s) {
  if (!csv_.is_open()) return;
  csv_.precision(17);
  csv_ << s.epoch << ',' << s.steps.size() << ',' << s.bridged << ',' << s.mean.l_d << ',' << s.mean.l_o << ','
       << s.mean.l_t << ',' << s.mean.l_overall << '\n';
  csv_.flush();
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x6a09e667f3bcc909ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Trainer::Trainer(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  model_ = std::make_unique<model::OprModel>(model::ModelConfig{config_.backbone, config_.strategy, config_.seed});
  optimizer_ = std::make_unique<Adam>(model_->parameters(), config_.learning_rate, config_.adam);
  rng_.seed(stream_seed(config_.seed));
}

StepReport Trainer::forward_batch(nn::Graph& g, const std::vector<const synth::AlignedQuad*>& batch,
                                  std::mt19937_64& rng, nn::Var* overall) const {
  const model::OprModel& m = *model_;
  const int size = m.input_size();
  const bool bridging_active = epoch_ >= config_.warmup_epochs;
  bridging::BridgeOptions bopts;
  bopts.pairs_per_quad = config_.bridge_pairs_per_quad;
  bopts.alpha_low = config_.bridge_alpha_low;
  bopts.alpha_high = config_.bridge_alpha_high;
  bopts.organization = config_.organization;
  bopts.strategy = config_.strategy;

  std::vector<nn::Var> ld_terms, lo_terms, lt_terms;
  StepReport report;
  report.epoch = epoch_;
  for (const synth::AlignedQuad* q : batch) {
    const AugmentDraw draw = draw_augment(rng, config_.augment);
    const VariantQuad vq = assemble_variant_batch(*q, config_);
    std::array<nn::Var, 4> features{};
    for (std::size_t i = 0; i < vq.kinds.size(); ++i) {
      const cv::Mat img = config_.augment.enabled ? apply_augment(vq.images[i], draw) : vq.images[i];
      const nn::Var f = m.encode(g, g.constant(data::image_to_tensor(img, size))).feature;
      nn::Var attention;
      if (vq.attribute_loss) {
        const nn::Var a = m.classify_attributes(g, f);
        lo_terms.push_back(loss::oriented_loss(g, a, vq.attribute_targets[i]));
        attention = m.project_attention(g, a);
      } else {
        attention = m.ones_attention(g);
      }
      ld_terms.push_back(loss::detection_loss(g, m.detect(g, f, attention), vq.detection_targets[i]));
      features[static_cast<std::size_t>(labels::anchor_index(vq.kinds[i]))] = f;
      ++report.anchors;
    }
    if (vq.bridging && bridging_active) {
      for (const bridging::BridgeDraw& d : bridging::draw_bridges(rng, bopts)) {
        if (!labels::adjacency_check(d.pair.first, d.pair.second, config_.organization)) {
          throw Error("bridging drew a non-adjacent pair");
        }
        const auto i = static_cast<std::size_t>(labels::anchor_index(d.pair.first));
        const auto j = static_cast<std::size_t>(labels::anchor_index(d.pair.second));
        const labels::LabelRecord target = bridging::mix_labels(
            labels::label_for(d.pair.first, config_.strategy, config_.organization, config_.class_permutation),
            labels::label_for(d.pair.second, config_.strategy, config_.organization, config_.class_permutation),
            d.alpha);
        const nn::Var mixed = nn::mix(g, features[i], features[j], d.alpha);
        lo_terms.push_back(loss::oriented_loss(g, m.classify_attributes(g, mixed), target));
        ++report.bridged;
      }
    }
    if (vq.transition_loss) {
      loss::GraphMapper mapper = [&m](nn::Graph& gr, nn::Var n, nn::Var f) { return m.transition(gr, n, f); };
      lt_terms.push_back(loss::transition_loss(g, features, rng, mapper, config_.organization));
    }
  }

  const nn::Var zero = g.constant(nn::Tensor::scalar(0.0));
  const nn::Var ld = nn::mean_of(g, ld_terms);
  const nn::Var lo = lo_terms.empty() ? zero : nn::mean_of(g, lo_terms);
  const nn::Var lt = lt_terms.empty() ? zero : nn::mean_of(g, lt_terms);
  const nn::Var total =
      nn::add(g, nn::add(g, ld, nn::scale(g, lo, config_.weights.beta)), nn::scale(g, lt, config_.weights.gamma));
  report.loss.l_d = g.value(ld).item();
  report.loss.l_o = g.value(lo).item();
  report.loss.l_t = g.value(lt).item();
  report.loss.l_overall = g.value(total).item();
  if (overall) *overall = total;
  return report;
}

StepReport Trainer::evaluate_batch(const std::vector<const synth::AlignedQuad*>& batch) const {
  std::mt19937_64 rng = rng_;
  nn::Graph g(false);
  return forward_batch(g, batch, rng, nullptr);
}

EpochSummary Trainer::train_epoch(const std::vector<synth::AlignedQuad>& quads, TrainLog* log) {
  if (quads.empty()) throw Error("train_epoch needs at least one quad");
  std::vector<std::size_t> order(quads.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng_);

  EpochSummary summary;
  summary.epoch = epoch_;
  const auto bq = static_cast<std::size_t>(config_.batch_quads);
  for (std::size_t start = 0; start < order.size(); start += bq) {
    std::vector<const synth::AlignedQuad*> batch;
    for (std::size_t k = start; k < std::min(order.size(), start + bq); ++k) batch.push_back(&quads[order[k]]);

    model_->zero_grad();
    nn::Graph g;
    nn::Var total;
    StepReport r = forward_batch(g, batch, rng_, &total);
    const auto& l = r.loss;
    if (!std::isfinite(l.l_overall) || !std::isfinite(l.l_d) || !std::isfinite(l.l_o) || !std::isfinite(l.l_t)) {
      std::vector<std::string> ids;
      for (const auto* q : batch) ids.push_back(q->frame_id());
      std::string msg = "non-finite loss at epoch " + std::to_string(epoch_) + ", step " +
                        std::to_string(step_ + 1) + "; batch frames:";
      for (const auto& id : ids) msg += " " + id;
      throw NanLossError(msg, std::move(ids));
    }
    g.backward(total);
    optimizer_->step();
    r.step = ++step_;
    summary.bridged += r.bridged;
    summary.steps.push_back(r);
    if (log) log->step(r, config_.weights);
  }
  const double n = static_cast<double>(summary.steps.size());
  for (const auto& s : summary.steps) {
    summary.mean.l_d += s.loss.l_d / n;
    summary.mean.l_o += s.loss.l_o / n;
    summary.mean.l_t += s.loss.l_t / n;
    summary.mean.l_overall += s.loss.l_overall / n;
  }
  ++epoch_;
  if (log) log->epoch(summary);
  return summary;
}

void Trainer::save_checkpoint(const std::filesystem::path& path) const {
  nlohmann::json params = nlohmann::json::object();
  for (const nn::Parameter* p : const_cast<model::OprModel&>(*model_).parameters()) {
    params[p->name] = {{"shape", p->value.shape()},
                       {"data", std::vector<double>(p->value.values().begin(), p->value.values().end())}};
  }
  std::ostringstream rng_text;
  rng_text << rng_;
  const nlohmann::json j{{"format", kCheckpointFormat},
                         {"version", kCheckpointVersion},
                         {"config", config_},
                         {"config_hash", config_hash(config_)},
                         {"backbone", config_.backbone},
                         {"strategy", std::string(labels::to_string(config_.strategy))},
                         {"label_table", labels::label_table_json(config_.strategy, config_.organization,
                                                                  config_.class_permutation)},
                         {"epoch", epoch_},
                         {"step", step_},
                         {"rng", rng_text.str()},
                         {"optimizer", optimizer_->state()},
                         {"parameters", params}};
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
    out << j.dump() << '\n';
    if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

std::unique_ptr<Trainer> Trainer::restore(const std::filesystem::path& path, const std::optional<RunConfig>& expected) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError("checkpoint " + path.string() + " is corrupt: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kCheckpointFormat) {
    throw CheckpointError(path.string() + " is not an OPR checkpoint");
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    throw CheckpointVersionError("checkpoint version " + j.value("version", nlohmann::json(nullptr)).dump() +
                                 " does not match supported version " + std::to_string(kCheckpointVersion));
  }
  RunConfig config;
  try {
    config = j.at("config").get<RunConfig>();
    if (j.at("config_hash").get<std::string>() != config_hash(config)) {
      throw CheckpointError("checkpoint config hash does not match its config block");
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint config unreadable: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config invalid: ") + e.what());
  }
  if (expected) {
    auto differs = [&](const char* what, const std::string& a, const std::string& b) {
      if (a != b) {
        throw CheckpointMismatchError(std::string("checkpoint ") + what + " '" + a + "' does not match requested '" +
                                      b + "'");
      }
    };
    differs("strategy", std::string(labels::to_string(config.strategy)),
            std::string(labels::to_string(expected->strategy)));
    differs("organization", std::string(labels::to_string(config.organization)),
            std::string(labels::to_string(expected->organization)));
    differs("variant", std::string(to_string(config.variant)), std::string(to_string(expected->variant)));
    differs("backbone", nlohmann::json(config.backbone).dump(), nlohmann::json(expected->backbone).dump());
  }

  auto trainer = std::make_unique<Trainer>(config);
  try {
    const auto& params = j.at("parameters");
    for (nn::Parameter* p : trainer->model_->parameters()) {
      const auto& e = params.at(p->name);
      if (e.at("shape").get<std::vector<int>>() != p->value.shape()) {
        throw CheckpointMismatchError("parameter " + p->name + " has a different shape in the checkpoint");
      }
      p->value = nn::Tensor(p->value.shape(), e.at("data").get<std::vector<double>>());
    }
    trainer->optimizer_->load_state(j.at("optimizer"));
    std::istringstream rng_text(j.at("rng").get<std::string>());
    rng_text >> trainer->rng_;
    if (!rng_text) throw CheckpointError("checkpoint generator state is unreadable");
    trainer->epoch_ = j.at("epoch").get<int>();
    trainer->step_ = j.at("step").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint is missing data: ") + e.what());
  }
  return trainer;
}

std::unique_ptr<model::OprModel> load_model(const std::filesystem::path& checkpoint, RunConfig* config) {
  auto trainer = Trainer::restore(checkpoint);
  if (config) *config = trainer->config();
  return trainer->release_model();
}

}  // namespace opr::train
