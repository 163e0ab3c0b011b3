#include "grad_suite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <opencv2/core.hpp>

#include "oracles.hpp"
#include "opr/bridging.hpp"
#include "opr/labels.hpp"
#include "opr/losses.hpp"
#include "opr/model/opr_model.hpp"
#include "opr/nn/ops.hpp"
#include "opr/train/trainer.hpp"

namespace oracle {

using opr::labels::AnchorKind;
using opr::nn::Graph;
using opr::nn::Parameter;
using opr::nn::Tensor;
using opr::nn::Var;

std::string to_string(LossTerm t) {
  switch (t) {
    case LossTerm::Oriented: return "L_o";
    case LossTerm::Detection: return "L_d";
    case LossTerm::Transition: return "L_t";
    case LossTerm::Overall: return "L_overall";
  }
  return "?";
}

namespace {

constexpr int kCoordsPerTensor = 6;

Tensor random_tensor(const std::vector<int>& shape, std::mt19937_64& rng, double sd = 1.0) {
  Tensor t(shape);
  std::normal_distribution<double> n(0.0, sd);
  for (double& v : t.values()) v = n(rng);
  return t;
}

std::vector<std::size_t> pick_coords(std::size_t size, std::mt19937_64& rng) {
  std::vector<std::size_t> all(size);
  for (std::size_t i = 0; i < size; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(std::min<std::size_t>(size, kCoordsPerTensor));
  return all;
}

opr::labels::StrategyKind random_strategy(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(0, 2);
  return static_cast<opr::labels::StrategyKind>(k(rng));
}

opr::labels::Organization random_organization(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(0, 2);
  return static_cast<opr::labels::Organization>(k(rng));
}

opr::model::BackboneSpec tiny_backbone(std::mt19937_64& rng) {
  opr::model::BackboneSpec b;
  b.input_size = 8;
  b.channels = {3, 4};
  b.toy_mode = std::bernoulli_distribution(0.5)(rng);
  b.normalize_features = std::bernoulli_distribution(0.5)(rng);
  return b;
}

void record(GradAudit& a, double analytic, double numeric) {
  a.max_rel_error = std::max(a.max_rel_error, rel_error(analytic, numeric));
  ++a.checked;
}

// Compares the gradient of `loss` w.r.t. every leaf and listed parameter
// against central differences of `value`, which recomputes the loss from
// (possibly perturbed) leaf tensors with the parameters as they stand.
void check(GradAudit& audit, std::vector<Tensor> leaves, const std::vector<Parameter*>& params,
           const std::function<Var(Graph&, const std::vector<Var>&)>& loss,
           const std::function<double(const std::vector<Tensor>&)>& value, std::mt19937_64& rng) {
  for (Parameter* p : params) p->zero_grad();
  Graph g;
  std::vector<Var> vars;
  for (const Tensor& t : leaves) vars.push_back(g.leaf(t));
  g.backward(loss(g, vars));

  for (std::size_t k = 0; k < leaves.size(); ++k) {
    const auto coords = pick_coords(leaves[k].size(), rng);
    const auto fd = five_point_diff(
        [&](const Tensor& x) {
          std::vector<Tensor> moved = leaves;
          moved[k] = x;
          return value(moved);
        },
        leaves[k], coords);
    for (std::size_t c = 0; c < coords.size(); ++c) record(audit, g.grad(vars[k])[coords[c]], fd[c]);
  }
  for (Parameter* p : params) {
    const Tensor analytic = p->grad;
    const Tensor original = p->value;
    const auto coords = pick_coords(p->value.size(), rng);
    const auto fd = five_point_diff(
        [&](const Tensor& x) {
          p->value = x;
          const double v = value(leaves);
          p->value = original;
          return v;
        },
        original, coords);
    for (std::size_t c = 0; c < coords.size(); ++c) record(audit, analytic[coords[c]], fd[c]);
  }
}

std::vector<Parameter*> head_params(opr::model::OprModel& m, bool with_transition) {
  std::vector<Parameter*> out;
  std::vector<Parameter*> backbone;
  // everything after the backbone's parameters belongs to the heads
  auto all = m.parameters();
  auto trans = m.transition_parameters();
  for (Parameter* p : all) {
    const bool is_backbone = p->name.rfind("backbone.", 0) == 0;
    const bool is_trans = std::find(trans.begin(), trans.end(), p) != trans.end();
    if (is_backbone) continue;
    if (is_trans && !with_transition) continue;
    out.push_back(p);
  }
  return out;
}

void oriented_instance(GradAudit& audit, std::mt19937_64& rng) {
  opr::model::ModelConfig mc{tiny_backbone(rng), random_strategy(rng), rng()};
  opr::model::OprModel m(mc);
  const auto org = random_organization(rng);
  const auto shape = m.feature_shape().dims();
  std::vector<Tensor> leaves;
  for (int k = 0; k < 4; ++k) leaves.push_back(random_tensor(shape, rng));
  std::vector<opr::labels::LabelRecord> targets;
  for (AnchorKind k : opr::labels::kAllAnchors) targets.push_back(opr::labels::label_for(k, mc.strategy, org));
  // two bridged samples on random adjacent pairs
  const auto pairs = opr::labels::adjacent_pairs(org);
  std::vector<std::pair<std::pair<int, int>, double>> mixes;
  for (int b = 0; b < 2; ++b) {
    const auto& pr = pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
    mixes.push_back({{opr::labels::anchor_index(pr.first), opr::labels::anchor_index(pr.second)},
                     std::uniform_real_distribution<double>(0, 1)(rng)});
  }
  auto build = [&](Graph& g, const std::vector<Var>& f) {
    std::vector<Var> terms;
    for (int k = 0; k < 4; ++k) {
      terms.push_back(opr::loss::oriented_loss(g, m.classify_attributes(g, f[static_cast<std::size_t>(k)]),
                                               targets[static_cast<std::size_t>(k)]));
    }
    for (const auto& [ij, alpha] : mixes) {
      const auto i = static_cast<std::size_t>(ij.first), j = static_cast<std::size_t>(ij.second);
      const Var mixed = opr::nn::mix(g, f[i], f[j], alpha);
      terms.push_back(opr::loss::oriented_loss(g, m.classify_attributes(g, mixed),
                                               opr::bridging::mix_labels(targets[i], targets[j], alpha)));
    }
    return opr::nn::mean_of(g, terms);
  };
  auto value = [&](const std::vector<Tensor>& ls) {
    Graph g(false);
    std::vector<Var> f;
    for (const Tensor& t : ls) f.push_back(g.constant(t));
    return g.value(build(g, f)).item();
  };
  check(audit, leaves, head_params(m, false), build, value, rng);
}

void detection_instance(GradAudit& audit, std::mt19937_64& rng) {
  opr::model::ModelConfig mc{tiny_backbone(rng), random_strategy(rng), rng()};
  opr::model::OprModel m(mc);
  const bool attention = std::bernoulli_distribution(0.75)(rng);
  const auto shape = m.feature_shape().dims();
  std::vector<Tensor> leaves;
  for (int k = 0; k < 4; ++k) leaves.push_back(random_tensor(shape, rng));
  auto build = [&](Graph& g, const std::vector<Var>& f) {
    std::vector<Var> terms;
    for (AnchorKind k : opr::labels::kAllAnchors) {
      const Var feat = f[static_cast<std::size_t>(opr::labels::anchor_index(k))];
      const Var mask = attention ? m.project_attention(g, m.classify_attributes(g, feat)) : m.ones_attention(g);
      terms.push_back(opr::loss::detection_loss(g, m.detect(g, feat, mask), opr::labels::detection_label(k)));
    }
    return opr::nn::mean_of(g, terms);
  };
  auto value = [&](const std::vector<Tensor>& ls) {
    Graph g(false);
    std::vector<Var> f;
    for (const Tensor& t : ls) f.push_back(g.constant(t));
    return g.value(build(g, f)).item();
  };
  check(audit, leaves, head_params(m, false), build, value, rng);
}

void transition_instance(GradAudit& audit, std::mt19937_64& rng) {
  opr::model::ModelConfig mc{tiny_backbone(rng), random_strategy(rng), rng()};
  opr::model::OprModel m(mc);
  const auto org = random_organization(rng);
  const auto shape = m.feature_shape().dims();
  std::vector<Tensor> leaves;
  for (int k = 0; k < 4; ++k) leaves.push_back(random_tensor(shape, rng));
  const std::mt19937_64 noise_rng(rng());
  auto build = [&](Graph& g, const std::vector<Var>& f) {
    std::mt19937_64 r = noise_rng;
    opr::loss::GraphMapper mapper = [&m](Graph& gr, Var n, Var x) { return m.transition(gr, n, x); };
    return opr::loss::transition_loss(g, {f[0], f[1], f[2], f[3]}, r, mapper, org);
  };
  // Targets are constants of the loss: perturbing a leaf only moves the terms
  // where it is the source. Recomputed with the plain-tensor mapper.
  auto value = [&](const std::vector<Tensor>& ls) {
    std::mt19937_64 r = noise_rng;
    double total = 0;
    for (const auto& [from, to] : opr::labels::transition_chain(org)) {
      const Tensor& src = ls[static_cast<std::size_t>(opr::labels::anchor_index(from))];
      const Tensor& dst = leaves[static_cast<std::size_t>(opr::labels::anchor_index(to))];
      const Tensor noise = opr::loss::sample_noise(src.shape(), r);
      const Tensor out = m.transition(noise, src);
      double ss = 0;
      for (std::size_t i = 0; i < out.size(); ++i) ss += (out[i] - dst[i]) * (out[i] - dst[i]);
      total += std::sqrt(ss);
    }
    return total;
  };
  check(audit, leaves, m.transition_parameters(), build, value, rng);
}

opr::synth::AlignedQuad random_quad(std::mt19937_64& rng, const std::string& id) {
  opr::synth::AlignedQuad q;
  q.frame_ids.fill(id);
  q.video_id = "v";
  q.identity_id = "p";
  for (std::size_t k = 0; k < 4; ++k) {
    q.images[k] = cv::Mat(8, 8, CV_8UC3);
    cv::RNG cvr(rng());
    cvr.fill(q.images[k], cv::RNG::UNIFORM, 0, 256);
    q.labels[k] = opr::labels::organization_variant(opr::labels::anchor_from_index(static_cast<int>(k)),
                                                    opr::labels::Organization::R2B2D);
  }
  return q;
}

// The full objective through the trainer's forward pass. Backbone weights
// also feed the detached transition targets, so they are only probed with
// gamma = 0; every other parameter is probed at the configured weights.
void overall_instance(GradAudit& audit, std::mt19937_64& rng, bool backbone) {
  opr::train::RunConfig cfg;
  cfg.backbone = tiny_backbone(rng);
  cfg.strategy = random_strategy(rng);
  cfg.organization = random_organization(rng);
  cfg.warmup_epochs = 0;  // bridging on from the first step
  cfg.batch_quads = 2;
  cfg.augment.enabled = false;
  cfg.seed = rng();
  cfg.weights.beta = 1.0;
  cfg.weights.gamma = backbone ? 0.0 : 10.0;
  opr::train::Trainer trainer(cfg);
  auto& m = trainer.model();
  std::vector<opr::synth::AlignedQuad> quads{random_quad(rng, "a"), random_quad(rng, "b")};
  const std::vector<const opr::synth::AlignedQuad*> batch{&quads[0], &quads[1]};
  const std::mt19937_64 step_rng(rng());

  std::vector<Parameter*> params;
  for (Parameter* p : m.parameters()) {
    const bool is_backbone = p->name.rfind("backbone.", 0) == 0;
    if (is_backbone == backbone) params.push_back(p);
  }
  auto build = [&](Graph& g, const std::vector<Var>&) {
    std::mt19937_64 r = step_rng;
    Var overall;
    trainer.forward_batch(g, batch, r, &overall);
    return overall;
  };
  auto value = [&](const std::vector<Tensor>&) {
    Graph g(false);
    std::mt19937_64 r = step_rng;
    return trainer.forward_batch(g, batch, r, nullptr).loss.l_overall;
  };
  check(audit, {}, params, build, value, rng);
}

}  // namespace

GradAudit audit_gradients(LossTerm term, int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GradAudit audit;
  for (int i = 0; i < instances; ++i) {
    switch (term) {
      case LossTerm::Oriented: oriented_instance(audit, rng); break;
      case LossTerm::Detection: detection_instance(audit, rng); break;
      case LossTerm::Transition: transition_instance(audit, rng); break;
      case LossTerm::Overall:
        overall_instance(audit, rng, false);
        overall_instance(audit, rng, true);
        break;
    }
    ++audit.instances;
  }
  return audit;
}

}  // namespace oracle
