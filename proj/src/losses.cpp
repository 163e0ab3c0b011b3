#include "opr/losses.hpp"

#include <algorithm>
#include <cmath>

#include "opr/errors.hpp"
#include "opr/nn/ops.hpp"

namespace opr::loss {

void to_json(nlohmann::json& j, const LossWeights& w) { j = nlohmann::json{{"beta", w.beta}, {"gamma", w.gamma}}; }

void from_json(const nlohmann::json& j, LossWeights& w) {
  w.beta = j.value("beta", w.beta);
  w.gamma = j.value("gamma", w.gamma);
  if (w.beta < 0.0 || w.gamma < 0.0) throw ConfigError("loss weights must be non-negative");
}

namespace {

double bce_term(double p, double t, double eps) {
  p = std::clamp(p, eps, 1.0 - eps);
  return -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
}

}  // namespace

double oriented_loss(const model::AttributePrediction& pred, const labels::LabelRecord& target, double eps) {
  if (pred.values.size() != target.values.size()) {
    throw ShapeMismatchError("oriented_loss: prediction has " + std::to_string(pred.values.size()) +
                             " components, target " + std::to_string(target.values.size()));
  }
  if (target.strategy == labels::StrategyKind::MultiClass) {
    double l = 0.0;
    for (std::size_t i = 0; i < pred.values.size(); ++i) {
      l -= target.values[i] * std::log(std::clamp(pred.values[i], eps, 1.0 - eps));
    }
    return l;
  }
  double l = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) l += bce_term(pred.values[i], target.values[i], eps);
  return l / static_cast<double>(pred.values.size());
}

double oriented_loss(const labels::AttributeLabel& pred, const labels::AttributeLabel& target, double eps) {
  return (bce_term(pred.a0, target.a0, eps) + bce_term(pred.a1, target.a1, eps) +
          bce_term(pred.a2, target.a2, eps)) /
         3.0;
}

double detection_loss(double score, labels::DetectionLabel label, double eps) {
  return bce_term(score, static_cast<double>(label.y), eps);
}

nn::Tensor sample_noise(const std::vector<int>& shape, std::mt19937_64& rng) {
  nn::Tensor n(shape);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : n.values()) v = dist(rng);
  return n;
}

double transition_loss(const std::array<nn::Tensor, 4>& features, std::mt19937_64& rng,
                       const TransitionMapper& mapper, labels::Organization organization) {
  for (const auto& f : features) nn::require_same_shape(f, features[0], "transition_loss features");
  double total = 0.0;
  for (const auto& [from, to] : labels::transition_chain(organization)) {
    const nn::Tensor& src = features[static_cast<std::size_t>(labels::anchor_index(from))];
    const nn::Tensor& dst = features[static_cast<std::size_t>(labels::anchor_index(to))];
    const nn::Tensor moved = mapper(sample_noise(src.shape(), rng), src);
    nn::require_same_shape(moved, dst, "transition_loss mapper output");
    double ss = 0.0;
    for (std::size_t i = 0; i < moved.size(); ++i) ss += (moved[i] - dst[i]) * (moved[i] - dst[i]);
    total += std::sqrt(ss);
  }
  return total;
}

double overall_loss(double l_d, double l_o, double l_t, const LossWeights& weights) {
  return l_d + weights.beta * l_o + weights.gamma * l_t;
}

LossReport make_report(double l_d, double l_o, double l_t, const LossWeights& weights) {
  return {l_d, l_o, l_t, overall_loss(l_d, l_o, l_t, weights)};
}

nn::Var oriented_loss(nn::Graph& g, nn::Var pred, const labels::LabelRecord& target, double eps) {
  if (target.strategy == labels::StrategyKind::MultiClass) {
    return nn::categorical_cross_entropy(g, pred, target.values, eps);
  }
  return nn::binary_cross_entropy(g, pred, target.values, eps);
}

nn::Var detection_loss(nn::Graph& g, nn::Var score, labels::DetectionLabel label, double eps) {
  return nn::binary_cross_entropy(g, score, {static_cast<double>(label.y)}, eps);
}

nn::Var transition_loss(nn::Graph& g, const std::array<nn::Var, 4>& features, std::mt19937_64& rng,
                        const GraphMapper& mapper, labels::Organization organization) {
  std::vector<nn::Var> terms;
  for (const auto& [from, to] : labels::transition_chain(organization)) {
    nn::Var src = features[static_cast<std::size_t>(labels::anchor_index(from))];
    nn::Var dst = nn::detach(g, features[static_cast<std::size_t>(labels::anchor_index(to))]);
    nn::Var noise = g.constant(sample_noise(g.value(src).shape(), rng));
    terms.push_back(nn::frobenius_norm(g, nn::sub(g, mapper(g, noise, src), dst)));
  }
  // Sum of the chain terms, expressed via the mean to reuse one reduction.
  return nn::scale(g, nn::mean_of(g, terms), static_cast<double>(terms.size()));
}

}  // namespace opr::loss
