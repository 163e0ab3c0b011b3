#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "opr/labels.hpp"
#include "opr/model/backbone.hpp"
#include "opr/nn/graph.hpp"

namespace opr::model {

// Output of the attribute classifier: (a0, a1, a2) for TripletBinary and
// MultiLabel, a 4-way class distribution for MultiClass.
struct AttributePrediction {
  labels::StrategyKind strategy = labels::StrategyKind::TripletBinary;
  std::vector<double> values;
};

struct ModelConfig {
  BackboneSpec backbone;
  labels::StrategyKind strategy = labels::StrategyKind::TripletBinary;
  std::uint64_t seed = 0;
};

// Backbone encoder plus the heads:
//   attribute classifier  A = C_a(F)       (pooled features -> per-strategy heads)
//   projector             M = P(A)         (linear -> SiLU -> broadcast -> 1x1 conv -> sigmoid)
//   detector              y = C_f(F * M)   (pool -> linear -> sigmoid)
//   transition mapper     F' = T(N, F)     (concat -> 3x3 conv -> SiLU -> 3x3 conv)
class OprModel {
 public:
  explicit OprModel(ModelConfig config);
  OprModel(ModelConfig config, std::unique_ptr<Backbone> backbone);

  OprModel(const OprModel&) = delete;
  OprModel& operator=(const OprModel&) = delete;

  const ModelConfig& config() const { return config_; }
  FeatureShape feature_shape() const { return backbone_->feature_shape(); }
  int input_size() const { return config_.backbone.input_size; }
  int prediction_size() const;

  // Graph-level forward pieces used by the trainer.
  Encoded encode(nn::Graph& g, nn::Var image) const;
  nn::Var classify_attributes(nn::Graph& g, nn::Var feature) const;
  nn::Var project_attention(nn::Graph& g, nn::Var prediction) const;
  nn::Var detect(nn::Graph& g, nn::Var feature, nn::Var attention) const;
  nn::Var transition(nn::Graph& g, nn::Var noise, nn::Var feature) const;
  nn::Var ones_attention(nn::Graph& g) const;

  // Evaluation-mode conveniences over plain tensors.
  nn::Tensor encode(const nn::Tensor& image) const;
  nn::Tensor embed(const nn::Tensor& image) const;
  AttributePrediction classify_attributes(const nn::Tensor& feature) const;
  nn::Tensor project_attention(const AttributePrediction& prediction) const;
  double detect(const nn::Tensor& feature, const nn::Tensor& attention) const;
  nn::Tensor transition(const nn::Tensor& noise, const nn::Tensor& feature) const;
  // Full detection path. When `use_attention` is false the attention map is
  // all ones, which is how the plain binary variants score images.
  double score(const nn::Tensor& image, bool use_attention) const;

  std::vector<nn::Parameter*> parameters();
  std::vector<nn::Parameter*> attribute_head_parameters(int head);
  std::vector<nn::Parameter*> transition_parameters();
  void zero_grad();

 private:
  void build_heads(std::uint64_t seed);
  void require_feature_shape(const nn::Tensor& t, const char* what) const;

  ModelConfig config_;
  std::unique_ptr<Backbone> backbone_;
  // attribute heads: one (w, b) pair per head
  std::vector<nn::Parameter> head_w_, head_b_;
  nn::Parameter proj_lin_w_, proj_lin_b_, proj_conv_w_, proj_conv_b_;
  nn::Parameter det_w_, det_b_;
  nn::Parameter trans1_w_, trans1_b_, trans2_w_, trans2_b_;
};

}  // namespace opr::model
