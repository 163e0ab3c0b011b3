#include "opr/train/config.hpp"

#include <cstdio>
#include <fstream>

#include "opr/errors.hpp"

namespace opr::train {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::BFOnly: return "bf-only";
    case Variant::DFOnly: return "df-only";
    case Variant::VHT: return "vht";
  }
  return "?";
}

Variant variant_from_string(std::string_view s) {
  if (s == "full") return Variant::Full;
  if (s == "bf-only") return Variant::BFOnly;
  if (s == "df-only") return Variant::DFOnly;
  if (s == "vht") return Variant::VHT;
  throw ConfigError("unknown variant '" + std::string(s) + "' (full, bf-only, df-only, vht)");
}

void RunConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_quads <= 0) throw ConfigError("batch_quads must be positive");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be non-negative");
  if (learning_rate < 0.0) throw ConfigError("learning_rate must be non-negative");
  if (weights.beta < 0.0 || weights.gamma < 0.0) throw ConfigError("loss weights must be non-negative");
  if (bridge_pairs_per_quad <= 0) throw ConfigError("bridge_pairs_per_quad must be positive");
  if (!(bridge_alpha_low >= 0.0 && bridge_alpha_low <= bridge_alpha_high && bridge_alpha_high <= 1.0)) {
    throw ConfigError("bridging alpha range must lie within [0,1]");
  }
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 && adam.eps > 0.0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
  if (augment.jpeg_quality_min < 1 || augment.jpeg_quality_max > 100 ||
      augment.jpeg_quality_min > augment.jpeg_quality_max) {
    throw ConfigError("JPEG quality range must lie within [1,100]");
  }
  labels::validate_permutation(class_permutation);
  backbone.feature_shape();
}

void to_json(nlohmann::json& j, const AugmentConfig& c) {
  j = {{"enabled", c.enabled},
       {"jpeg_prob", c.jpeg_prob},
       {"jpeg_quality_min", c.jpeg_quality_min},
       {"jpeg_quality_max", c.jpeg_quality_max},
       {"brightness_contrast_prob", c.brightness_contrast_prob},
       {"brightness_max", c.brightness_max},
       {"contrast_max", c.contrast_max},
       {"rotation_prob", c.rotation_prob},
       {"rotation_max_deg", c.rotation_max_deg},
       {"median_blur_prob", c.median_blur_prob}};
}

void from_json(const nlohmann::json& j, AugmentConfig& c) {
  AugmentConfig d;
  c.enabled = j.value("enabled", d.enabled);
  c.jpeg_prob = j.value("jpeg_prob", d.jpeg_prob);
  c.jpeg_quality_min = j.value("jpeg_quality_min", d.jpeg_quality_min);
  c.jpeg_quality_max = j.value("jpeg_quality_max", d.jpeg_quality_max);
  c.brightness_contrast_prob = j.value("brightness_contrast_prob", d.brightness_contrast_prob);
  c.brightness_max = j.value("brightness_max", d.brightness_max);
  c.contrast_max = j.value("contrast_max", d.contrast_max);
  c.rotation_prob = j.value("rotation_prob", d.rotation_prob);
  c.rotation_max_deg = j.value("rotation_max_deg", d.rotation_max_deg);
  c.median_blur_prob = j.value("median_blur_prob", d.median_blur_prob);
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"strategy", std::string(labels::to_string(c.strategy))},
       {"organization", std::string(labels::to_string(c.organization))},
       {"class_permutation", c.class_permutation},
       {"weights", c.weights},
       {"learning_rate", c.learning_rate},
       {"epochs", c.epochs},
       {"batch_quads", c.batch_quads},
       {"warmup_epochs", c.warmup_epochs},
       {"seed", c.seed},
       {"backbone", c.backbone},
       {"variant", std::string(to_string(c.variant))},
       {"bridge_pairs_per_quad", c.bridge_pairs_per_quad},
       {"bridge_alpha_low", c.bridge_alpha_low},
       {"bridge_alpha_high", c.bridge_alpha_high},
       {"adam", {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps}}},
       {"augment", c.augment},
       {"parallel_data", c.parallel_data}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  RunConfig d;
  try {
    c.strategy = labels::strategy_from_string(j.value("strategy", std::string(labels::to_string(d.strategy))));
    c.organization =
        labels::organization_from_string(j.value("organization", std::string(labels::to_string(d.organization))));
    c.class_permutation = j.value("class_permutation", d.class_permutation);
    c.weights = j.value("weights", d.weights);
    c.learning_rate = j.value("learning_rate", d.learning_rate);
    c.epochs = j.value("epochs", d.epochs);
    c.batch_quads = j.value("batch_quads", d.batch_quads);
    c.warmup_epochs = j.value("warmup_epochs", d.warmup_epochs);
    c.seed = j.value("seed", d.seed);
    c.backbone = j.value("backbone", d.backbone);
    c.variant = variant_from_string(j.value("variant", std::string(to_string(d.variant))));
    c.bridge_pairs_per_quad = j.value("bridge_pairs_per_quad", d.bridge_pairs_per_quad);
    c.bridge_alpha_low = j.value("bridge_alpha_low", d.bridge_alpha_low);
    c.bridge_alpha_high = j.value("bridge_alpha_high", d.bridge_alpha_high);
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      c.adam.beta1 = a.value("beta1", d.adam.beta1);
      c.adam.beta2 = a.value("beta2", d.adam.beta2);
      c.adam.eps = a.value("eps", d.adam.eps);
    } else {
      c.adam = d.adam;
    }
    c.augment = j.value("augment", d.augment);
    c.parallel_data = j.value("parallel_data", d.parallel_data);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  c.validate();
}

std::string config_hash(const RunConfig& c) {
  const std::string text = nlohmann::json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("run config " + path + " is not valid JSON: " + e.what());
  }
  return j.get<RunConfig>();
}

}  // namespace opr::train
