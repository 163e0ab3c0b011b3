#include "opr/model/backbone.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "opr/errors.hpp"
#include "opr/nn/init.hpp"
#include "opr/nn/ops.hpp"

namespace opr::model {

FeatureShape BackboneSpec::feature_shape() const {
  if (channels.empty()) throw ConfigError("backbone needs at least one conv stage");
  int side = input_size;
  for (std::size_t i = 0; i < channels.size(); ++i) side = (side + 2 - 3) / 2 + 1;
  return {side, side, channels.back()};
}

void to_json(nlohmann::json& j, const BackboneSpec& s) {
  const FeatureShape f = s.feature_shape();
  j = nlohmann::json{{"name", s.name},
                     {"input_size", s.input_size},
                     {"channels", s.channels},
                     {"toy_mode", s.toy_mode},
                     {"normalize_features", s.normalize_features},
                     {"feature_shape", {f.h, f.w, f.c}}};
}

void from_json(const nlohmann::json& j, BackboneSpec& s) {
  s.name = j.value("name", s.name);
  s.input_size = j.value("input_size", s.input_size);
  s.channels = j.value("channels", s.channels);
  s.toy_mode = j.value("toy_mode", s.toy_mode);
  s.normalize_features = j.value("normalize_features", s.normalize_features);
}

namespace {

std::map<std::string, BackboneFactory>& registry() {
  static std::map<std::string, BackboneFactory> r = {
      {"reference_cnn", [](const BackboneSpec& spec, std::uint64_t seed) -> std::unique_ptr<Backbone> {
         return std::make_unique<ReferenceCnn>(spec, seed);
       }}};
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void register_backbone(const std::string& name, BackboneFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::unique_ptr<Backbone> make_backbone(const BackboneSpec& spec, std::uint64_t seed) {
  BackboneFactory factory;
  {
    std::lock_guard lock(registry_mutex());
    auto it = registry().find(spec.name);
    if (it == registry().end()) throw ConfigError("no backbone registered under '" + spec.name + "'");
    factory = it->second;
  }
  return factory(spec, seed);
}

ReferenceCnn::ReferenceCnn(BackboneSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  if (spec_.input_size <= 0) throw ConfigError("backbone input_size must be positive");
  std::mt19937_64 rng(seed);
  int in_ch = 3;
  for (std::size_t i = 0; i < spec_.channels.size(); ++i) {
    const int out_ch = spec_.channels[i];
    const std::string prefix = "backbone.conv" + std::to_string(i);
    conv_w_.push_back(nn::uniform_parameter(prefix + ".w", {3, 3, in_ch, out_ch}, 9 * in_ch, rng, std::sqrt(2.0)));
    conv_b_.push_back(nn::zero_parameter(prefix + ".b", {out_ch}));
    in_ch = out_ch;
  }
  if (spec_.toy_mode) {
    const FeatureShape f = spec_.feature_shape();
    const int flat = f.h * f.w * f.c;
    squeeze_w_ = nn::uniform_parameter("backbone.squeeze.w", {2, in_ch}, in_ch, rng);
    squeeze_b_ = nn::zero_parameter("backbone.squeeze.b", {2});
    expand_w_ = nn::uniform_parameter("backbone.expand.w", {flat, 2}, 2, rng);
    expand_b_ = nn::zero_parameter("backbone.expand.b", {flat});
  }
}

Encoded ReferenceCnn::forward(nn::Graph& g, nn::Var image) const {
  const nn::Tensor& img = g.value(image);
  if (img.rank() != 3 || img.dim(0) != spec_.input_size || img.dim(1) != spec_.input_size || img.dim(2) != 3) {
    throw ShapeMismatchError("encode: expected image of shape (" + std::to_string(spec_.input_size) + "," +
                             std::to_string(spec_.input_size) + ",3), got " + nn::shape_string(img.shape()));
  }
  nn::Var x = image;
  for (std::size_t i = 0; i < conv_w_.size(); ++i) {
    x = nn::conv2d(g, x, g.param(conv_w_[i]), g.param(conv_b_[i]), 2, 1);
    x = nn::silu(g, x);
  }
  if (!spec_.toy_mode) {
    if (spec_.normalize_features) x = nn::layer_norm(g, x);
    return {x, nn::global_avg_pool(g, x)};
  }

  nn::Var pooled = nn::global_avg_pool(g, x);
  nn::Var z = nn::linear(g, pooled, g.param(squeeze_w_), g.param(squeeze_b_));
  nn::Var f = nn::reshape(g, nn::linear(g, z, g.param(expand_w_), g.param(expand_b_)), spec_.feature_shape().dims());
  if (spec_.normalize_features) f = nn::layer_norm(g, f);
  return {f, z};
}

std::vector<nn::Parameter*> ReferenceCnn::parameters() {
  std::vector<nn::Parameter*> out;
  for (std::size_t i = 0; i < conv_w_.size(); ++i) {
    out.push_back(&conv_w_[i]);
    out.push_back(&conv_b_[i]);
  }
  if (spec_.toy_mode) {
    for (nn::Parameter* p : {&squeeze_w_, &squeeze_b_, &expand_w_, &expand_b_}) out.push_back(p);
  }
  return out;
}

}  // namespace opr::model
