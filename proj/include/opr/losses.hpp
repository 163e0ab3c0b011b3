#pragma once

#include <array>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "opr/labels.hpp"
#include "opr/model/opr_model.hpp"
#include "opr/nn/graph.hpp"

namespace opr::loss {

// Probability clamp applied before every log.
inline constexpr double kProbEps = 1e-7;

struct LossWeights {
  double beta = 1.0;   // oriented loss
  double gamma = 10.0; // transition loss
};

struct LossReport {
  double l_d = 0.0;
  double l_o = 0.0;
  double l_t = 0.0;
  double l_overall = 0.0;
};

void to_json(nlohmann::json& j, const LossWeights& w);
void from_json(const nlohmann::json& j, LossWeights& w);

// Mean binary cross-entropy over the attribute components. For the
// multi-class strategy the target is a (possibly mixed) class distribution
// and the loss is the categorical cross-entropy instead.
double oriented_loss(const model::AttributePrediction& pred, const labels::LabelRecord& target,
                     double eps = kProbEps);
double oriented_loss(const labels::AttributeLabel& pred, const labels::AttributeLabel& target,
                     double eps = kProbEps);

double detection_loss(double score, labels::DetectionLabel label, double eps = kProbEps);

// F' = T(N, F).
using TransitionMapper = std::function<nn::Tensor(const nn::Tensor& noise, const nn::Tensor& feature)>;

// Standard-normal tensor of the given shape.
nn::Tensor sample_noise(const std::vector<int>& shape, std::mt19937_64& rng);

// Sum over the transition chain of ||T(N_k, F_from) - F_to||_F with fresh
// noise per term. `features` is indexed by AnchorKind.
double transition_loss(const std::array<nn::Tensor, 4>& features, std::mt19937_64& rng,
                       const TransitionMapper& mapper,
                       labels::Organization organization = labels::Organization::R2B2D);

double overall_loss(double l_d, double l_o, double l_t, const LossWeights& weights);
LossReport make_report(double l_d, double l_o, double l_t, const LossWeights& weights);

// Graph-level counterparts used during training.
nn::Var oriented_loss(nn::Graph& g, nn::Var pred, const labels::LabelRecord& target, double eps = kProbEps);
nn::Var detection_loss(nn::Graph& g, nn::Var score, labels::DetectionLabel label, double eps = kProbEps);

using GraphMapper = std::function<nn::Var(nn::Graph&, nn::Var noise, nn::Var feature)>;

// Targets are detached: no gradient reaches F_to through this loss.
nn::Var transition_loss(nn::Graph& g, const std::array<nn::Var, 4>& features, std::mt19937_64& rng,
                        const GraphMapper& mapper,
                        labels::Organization organization = labels::Organization::R2B2D);

}  // namespace opr::loss
