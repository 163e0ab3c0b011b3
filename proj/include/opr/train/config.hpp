#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "opr/labels.hpp"
#include "opr/losses.hpp"
#include "opr/model/backbone.hpp"

namespace opr::train {

// Full: OPR (attribute heads, attention, bridging, transition loss).
// BFOnly: binary real vs {SBI, CBI}. DFOnly: binary real vs deepfake.
// VHT: binary real vs {SBI, CBI, deepfake}.
enum class Variant { Full, BFOnly, DFOnly, VHT };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view s);

// Augmentations drawn once per quad and applied identically to its members.
struct AugmentConfig {
  bool enabled = true;
  double jpeg_prob = 0.3;
  int jpeg_quality_min = 60;
  int jpeg_quality_max = 95;
  double brightness_contrast_prob = 0.5;
  double brightness_max = 20.0;  // pixel levels
  double contrast_max = 0.2;
  double rotation_prob = 0.3;
  double rotation_max_deg = 10.0;
  double median_blur_prob = 0.2;
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct RunConfig {
  labels::StrategyKind strategy = labels::StrategyKind::TripletBinary;
  labels::Organization organization = labels::Organization::R2B2D;
  labels::ClassPermutation class_permutation = labels::kIdentityPermutation;
  loss::LossWeights weights;
  double learning_rate = 2e-4;
  int epochs = 20;
  int batch_quads = 6;
  int warmup_epochs = 2;
  std::uint64_t seed = 0;
  model::BackboneSpec backbone;
  Variant variant = Variant::Full;
  int bridge_pairs_per_quad = 3;
  double bridge_alpha_low = 0.0;
  double bridge_alpha_high = 1.0;
  AdamConfig adam;
  AugmentConfig augment;
  // Data preparation runs on the training thread when false, which is what
  // the bit-reproducibility contract assumes. Only serial execution exists
  // today; the flag is recorded so a parallel loader can honour it.
  bool parallel_data = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const AugmentConfig& c);
void from_json(const nlohmann::json& j, AugmentConfig& c);

// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

RunConfig load_run_config(const std::string& path);

}  // namespace opr::train
