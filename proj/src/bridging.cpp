#include "opr/bridging.hpp"

#include "opr/errors.hpp"

namespace opr::bridging {

labels::LabelRecord mix_labels(const labels::LabelRecord& first, const labels::LabelRecord& second, double alpha) {
  if (first.values.size() != second.values.size() || first.strategy != second.strategy) {
    throw Error("mix_labels: label records of different strategies");
  }
  labels::LabelRecord out{first.strategy, std::vector<double>(first.values.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = alpha * first.values[i] + (1.0 - alpha) * second.values[i];
  }
  return out;
}

nn::Tensor mix_features(const nn::Tensor& first, const nn::Tensor& second, double alpha) {
  nn::require_same_shape(first, second, "mix_features");
  nn::Tensor out(first.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * first[i] + (1.0 - alpha) * second[i];
  return out;
}

BridgedSample BridgedSample::make(const nn::Tensor& first_feature, const nn::Tensor& second_feature,
                                  const labels::LabelRecord& first_label, const labels::LabelRecord& second_label,
                                  AnchorPair pair, double alpha, labels::Organization organization) {
  if (!labels::adjacency_check(pair.first, pair.second, organization)) {
    throw Error("feature bridging is restricted to adjacent anchors; got (" +
                std::string(labels::to_string(pair.first)) + ", " + std::string(labels::to_string(pair.second)) +
                ") under " + std::string(labels::to_string(organization)));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error("mixing ratio outside [0,1]");
  BridgedSample s;
  s.feature_ = mix_features(first_feature, second_feature, alpha);
  s.label_ = mix_labels(first_label, second_label, alpha);
  s.pair_ = pair;
  s.alpha_ = alpha;
  return s;
}

std::vector<BridgeDraw> draw_bridges(std::mt19937_64& rng, const BridgeOptions& options) {
  if (options.pairs_per_quad <= 0) throw ConfigError("pairs_per_quad must be positive");
  if (!(options.alpha_low >= 0.0 && options.alpha_high <= 1.0 && options.alpha_low <= options.alpha_high)) {
    throw ConfigError("bridging alpha range must lie within [0,1]");
  }
  const auto pairs = labels::adjacent_pairs(options.organization);
  std::vector<BridgeDraw> draws;
  draws.reserve(static_cast<std::size_t>(options.pairs_per_quad));
  for (int k = 0; k < options.pairs_per_quad; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    const AnchorPair pair = pairs[pick(rng)];
    std::uniform_real_distribution<double> ratio(options.alpha_low, options.alpha_high);
    draws.push_back({pair, ratio(rng)});
  }
  return draws;
}

void require_same_frame(const std::array<std::string, 4>& frame_ids) {
  for (const auto& id : frame_ids) {
    if (id != frame_ids[0]) {
      throw FrameMismatchError("feature bridging requires features aligned to one frame; got '" + frame_ids[0] +
                               "' and '" + id + "'");
    }
  }
}

std::vector<BridgedSample> bridge(const QuadFeatures& quad, const std::array<labels::LabelRecord, 4>& quad_labels,
                                  std::mt19937_64& rng, const BridgeOptions& options) {
  require_same_frame(quad.frame_ids);
  for (const auto& f : quad.features) nn::require_same_shape(f, quad.features[0], "bridge features");
  std::vector<BridgedSample> out;
  for (const BridgeDraw& d : draw_bridges(rng, options)) {
    const auto i = static_cast<std::size_t>(labels::anchor_index(d.pair.first));
    const auto j = static_cast<std::size_t>(labels::anchor_index(d.pair.second));
    out.push_back(BridgedSample::make(quad.features[i], quad.features[j], quad_labels[i], quad_labels[j], d.pair,
                                      d.alpha, options.organization));
  }
  return out;
}

}  // namespace opr::bridging
