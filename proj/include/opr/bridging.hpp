#pragma once

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "opr/labels.hpp"
#include "opr/nn/tensor.hpp"

// Feature bridging: mixup between the features (and labels) of two adjacent
// anchors taken from the same aligned frame.
namespace opr::bridging {

using AnchorPair = std::pair<labels::AnchorKind, labels::AnchorKind>;

struct BridgeOptions {
  int pairs_per_quad = 3;
  double alpha_low = 0.0;
  double alpha_high = 1.0;
  labels::Organization organization = labels::Organization::R2B2D;
  labels::StrategyKind strategy = labels::StrategyKind::TripletBinary;
};

// One planned mix: which adjacent pair, and the ratio applied to pair.first.
struct BridgeDraw {
  AnchorPair pair;
  double alpha = 0.0;
};

// Mix(a, b) = alpha * a + (1 - alpha) * b, componentwise.
labels::LabelRecord mix_labels(const labels::LabelRecord& first, const labels::LabelRecord& second, double alpha);
nn::Tensor mix_features(const nn::Tensor& first, const nn::Tensor& second, double alpha);

// A mixed feature with its mixed label. Only constructible for adjacent pairs.
class BridgedSample {
 public:
  // Throws opr::Error when `pair` is not adjacent under `organization`.
  static BridgedSample make(const nn::Tensor& first_feature, const nn::Tensor& second_feature,
                            const labels::LabelRecord& first_label, const labels::LabelRecord& second_label,
                            AnchorPair pair, double alpha, labels::Organization organization);

  const nn::Tensor& feature() const { return feature_; }
  const labels::LabelRecord& label() const { return label_; }
  const AnchorPair& pair() const { return pair_; }
  double alpha() const { return alpha_; }

 private:
  BridgedSample() = default;
  nn::Tensor feature_;
  labels::LabelRecord label_;
  AnchorPair pair_{};
  double alpha_ = 0.0;
};

// Per-quad inputs. All four entries are indexed by AnchorKind and must share
// one frame id.
struct QuadFeatures {
  std::array<std::string, 4> frame_ids;
  std::array<nn::Tensor, 4> features;
};

// Draws `pairs_per_quad` (pair, alpha) plans: pair uniform over the adjacent
// pairs of the active organization, alpha uniform on [alpha_low, alpha_high].
std::vector<BridgeDraw> draw_bridges(std::mt19937_64& rng, const BridgeOptions& options);

std::vector<BridgedSample> bridge(const QuadFeatures& quad, const std::array<labels::LabelRecord, 4>& quad_labels,
                                  std::mt19937_64& rng, const BridgeOptions& options);

// Throws FrameMismatchError unless all ids are equal.
void require_same_frame(const std::array<std::string, 4>& frame_ids);

}  // namespace opr::bridging
