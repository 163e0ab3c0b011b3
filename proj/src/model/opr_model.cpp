#include "opr/model/opr_model.hpp"

#include <cmath>
#include <random>

#include "opr/errors.hpp"
#include "opr/nn/init.hpp"
#include "opr/nn/ops.hpp"

namespace opr::model {

using labels::StrategyKind;

OprModel::OprModel(ModelConfig config)
    : OprModel(config, make_backbone(config.backbone, config.seed)) {}

OprModel::OprModel(ModelConfig config, std::unique_ptr<Backbone> backbone)
    : config_(std::move(config)), backbone_(std::move(backbone)) {
  if (!backbone_) throw ConfigError("OprModel needs a backbone");
  // Heads draw from a stream independent of the backbone's.
  build_heads(config_.seed ^ 0x9e3779b97f4a7c15ULL);
}

int OprModel::prediction_size() const { return config_.strategy == StrategyKind::MultiClass ? 4 : 3; }

void OprModel::build_heads(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const FeatureShape f = feature_shape();
  const int c = f.c;
  switch (config_.strategy) {
    case StrategyKind::TripletBinary:
      for (int i = 0; i < 3; ++i) {
        const std::string p = "attr.head" + std::to_string(i);
        head_w_.push_back(nn::uniform_parameter(p + ".w", {2, c}, c, rng));
        head_b_.push_back(nn::zero_parameter(p + ".b", {2}));
      }
      break;
    case StrategyKind::MultiLabel:
      head_w_.push_back(nn::uniform_parameter("attr.head0.w", {3, c}, c, rng));
      head_b_.push_back(nn::zero_parameter("attr.head0.b", {3}));
      break;
    case StrategyKind::MultiClass:
      head_w_.push_back(nn::uniform_parameter("attr.head0.w", {4, c}, c, rng));
      head_b_.push_back(nn::zero_parameter("attr.head0.b", {4}));
      break;
  }
  const int k = prediction_size();
  proj_lin_w_ = nn::uniform_parameter("proj.lin.w", {c, k}, k, rng);
  proj_lin_b_ = nn::zero_parameter("proj.lin.b", {c});
  proj_conv_w_ = nn::uniform_parameter("proj.conv.w", {1, 1, c, c}, c, rng);
  proj_conv_b_ = nn::zero_parameter("proj.conv.b", {c});
  det_w_ = nn::uniform_parameter("det.w", {1, c}, c, rng);
  det_b_ = nn::zero_parameter("det.b", {1});
  trans1_w_ = nn::uniform_parameter("trans.conv1.w", {3, 3, 2 * c, c}, 9 * 2 * c, rng, std::sqrt(2.0));
  trans1_b_ = nn::zero_parameter("trans.conv1.b", {c});
  trans2_w_ = nn::uniform_parameter("trans.conv2.w", {3, 3, c, c}, 9 * c, rng);
  trans2_b_ = nn::zero_parameter("trans.conv2.b", {c});
}

void OprModel::require_feature_shape(const nn::Tensor& t, const char* what) const {
  if (t.shape() != feature_shape().dims()) {
    throw ShapeMismatchError(std::string(what) + ": expected feature shape " +
                             nn::shape_string(feature_shape().dims()) + ", got " + nn::shape_string(t.shape()));
  }
}

Encoded OprModel::encode(nn::Graph& g, nn::Var image) const { return backbone_->forward(g, image); }

nn::Var OprModel::classify_attributes(nn::Graph& g, nn::Var feature) const {
  require_feature_shape(g.value(feature), "classify_attributes");
  nn::Var pooled = nn::global_avg_pool(g, feature);
  switch (config_.strategy) {
    case StrategyKind::TripletBinary: {
      std::vector<nn::Var> parts;
      for (std::size_t i = 0; i < 3; ++i) {
        nn::Var logits = nn::linear(g, pooled, g.param(head_w_[i]), g.param(head_b_[i]));
        parts.push_back(nn::element(g, nn::softmax(g, logits), 1));
      }
      return nn::concat(g, parts);
    }
    case StrategyKind::MultiLabel:
      return nn::sigmoid(g, nn::linear(g, pooled, g.param(head_w_[0]), g.param(head_b_[0])));
    case StrategyKind::MultiClass:
      return nn::softmax(g, nn::linear(g, pooled, g.param(head_w_[0]), g.param(head_b_[0])));
  }
  throw Error("unreachable strategy");
}

nn::Var OprModel::project_attention(nn::Graph& g, nn::Var prediction) const {
  const FeatureShape f = feature_shape();
  nn::Var v = nn::silu(g, nn::linear(g, prediction, g.param(proj_lin_w_), g.param(proj_lin_b_)));
  nn::Var map = nn::broadcast_hw(g, v, f.h, f.w);
  return nn::sigmoid(g, nn::conv2d(g, map, g.param(proj_conv_w_), g.param(proj_conv_b_), 1, 0));
}

nn::Var OprModel::detect(nn::Graph& g, nn::Var feature, nn::Var attention) const {
  require_feature_shape(g.value(feature), "detect feature");
  require_feature_shape(g.value(attention), "detect attention");
  nn::Var gated = nn::mul(g, feature, attention);
  nn::Var logit = nn::linear(g, nn::global_avg_pool(g, gated), g.param(det_w_), g.param(det_b_));
  return nn::element(g, nn::sigmoid(g, logit), 0);
}

nn::Var OprModel::transition(nn::Graph& g, nn::Var noise, nn::Var feature) const {
  nn::require_same_shape(g.value(noise), g.value(feature), "transition noise/feature");
  require_feature_shape(g.value(feature), "transition");
  nn::Var x = nn::concat_channels(g, feature, noise);
  x = nn::silu(g, nn::conv2d(g, x, g.param(trans1_w_), g.param(trans1_b_), 1, 1));
  return nn::conv2d(g, x, g.param(trans2_w_), g.param(trans2_b_), 1, 1);
}

nn::Var OprModel::ones_attention(nn::Graph& g) const {
  return g.constant(nn::Tensor(feature_shape().dims(), 1.0));
}

nn::Tensor OprModel::encode(const nn::Tensor& image) const {
  nn::Graph g(false);
  return g.value(encode(g, g.constant(image)).feature);
}

nn::Tensor OprModel::embed(const nn::Tensor& image) const {
  nn::Graph g(false);
  return g.value(encode(g, g.constant(image)).embedding);
}

AttributePrediction OprModel::classify_attributes(const nn::Tensor& feature) const {
  nn::Graph g(false);
  const nn::Tensor& out = g.value(classify_attributes(g, g.constant(feature)));
  return {config_.strategy, std::vector<double>(out.values().begin(), out.values().end())};
}

nn::Tensor OprModel::project_attention(const AttributePrediction& prediction) const {
  if (static_cast<int>(prediction.values.size()) != prediction_size()) {
    throw ShapeMismatchError("project_attention: prediction has " + std::to_string(prediction.values.size()) +
                             " components, model expects " + std::to_string(prediction_size()));
  }
  nn::Graph g(false);
  nn::Tensor p({prediction_size()}, prediction.values);
  return g.value(project_attention(g, g.constant(std::move(p))));
}

double OprModel::detect(const nn::Tensor& feature, const nn::Tensor& attention) const {
  nn::Graph g(false);
  return g.value(detect(g, g.constant(feature), g.constant(attention))).item();
}

nn::Tensor OprModel::transition(const nn::Tensor& noise, const nn::Tensor& feature) const {
  nn::Graph g(false);
  return g.value(transition(g, g.constant(noise), g.constant(feature)));
}

double OprModel::score(const nn::Tensor& image, bool use_attention) const {
  nn::Graph g(false);
  nn::Var f = encode(g, g.constant(image)).feature;
  nn::Var m = use_attention ? project_attention(g, classify_attributes(g, f)) : ones_attention(g);
  return g.value(detect(g, f, m)).item();
}

std::vector<nn::Parameter*> OprModel::parameters() {
  std::vector<nn::Parameter*> out = backbone_->parameters();
  for (std::size_t i = 0; i < head_w_.size(); ++i) {
    out.push_back(&head_w_[i]);
    out.push_back(&head_b_[i]);
  }
  for (nn::Parameter* p : {&proj_lin_w_, &proj_lin_b_, &proj_conv_w_, &proj_conv_b_, &det_w_, &det_b_, &trans1_w_,
                           &trans1_b_, &trans2_w_, &trans2_b_}) {
    out.push_back(p);
  }
  return out;
}

std::vector<nn::Parameter*> OprModel::attribute_head_parameters(int head) {
  const auto i = static_cast<std::size_t>(head);
  if (i >= head_w_.size()) throw Error("no attribute head " + std::to_string(head));
  return {&head_w_[i], &head_b_[i]};
}

std::vector<nn::Parameter*> OprModel::transition_parameters() {
  return {&trans1_w_, &trans1_b_, &trans2_w_, &trans2_b_};
}

void OprModel::zero_grad() {
  for (nn::Parameter* p : parameters()) p->zero_grad();
}

}  // namespace opr::model
