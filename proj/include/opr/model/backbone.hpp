#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opr/nn/graph.hpp"

namespace opr::model {

struct FeatureShape {
  int h = 0;
  int w = 0;
  int c = 0;

  std::vector<int> dims() const { return {h, w, c}; }
  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

// Declarative description of an encoder. `name` selects a registered factory;
// `channels` lists one stride-2 3x3 convolution per entry for the reference
// CNN. In toy mode the encoder squeezes its output through a 2-D bottleneck
// that doubles as the latent-analysis tap; the feature map handed to the
// heads keeps its (h, w, c) shape either way.
struct BackboneSpec {
  std::string name = "reference_cnn";
  int input_size = 256;
  std::vector<int> channels = {8, 16, 32, 32, 32};
  bool toy_mode = false;
  // Standardize the feature map (no affine). Pins the feature scale so the
  // encoder cannot shrink F to lower the transition loss for free. Off by
  // default: on the desk data it hurt every variant.
  bool normalize_features = false;

  FeatureShape feature_shape() const;
  int embedding_dim() const { return toy_mode ? 2 : channels.back(); }
};

void to_json(nlohmann::json& j, const BackboneSpec& s);
void from_json(const nlohmann::json& j, BackboneSpec& s);

struct Encoded {
  nn::Var feature;    // (h, w, c)
  nn::Var embedding;  // (d): the 2-D tap in toy mode, pooled features otherwise
};

// Encoder interface. Implementations own their parameters.
class Backbone {
 public:
  virtual ~Backbone() = default;

  virtual const BackboneSpec& spec() const = 0;
  virtual FeatureShape feature_shape() const = 0;
  virtual int embedding_dim() const = 0;
  // image: (input_size, input_size, 3).
  virtual Encoded forward(nn::Graph& g, nn::Var image) const = 0;
  virtual std::vector<nn::Parameter*> parameters() = 0;
};

using BackboneFactory = std::function<std::unique_ptr<Backbone>(const BackboneSpec&, std::uint64_t seed)>;

// Adapter slot: any encoder registered here can back an OprModel.
void register_backbone(const std::string& name, BackboneFactory factory);
std::unique_ptr<Backbone> make_backbone(const BackboneSpec& spec, std::uint64_t seed);

// Small strided CNN with SiLU activations, for desk-scale training.
class ReferenceCnn : public Backbone {
 public:
  ReferenceCnn(BackboneSpec spec, std::uint64_t seed);

  const BackboneSpec& spec() const override { return spec_; }
  FeatureShape feature_shape() const override { return spec_.feature_shape(); }
  int embedding_dim() const override { return spec_.embedding_dim(); }
  Encoded forward(nn::Graph& g, nn::Var image) const override;
  std::vector<nn::Parameter*> parameters() override;

 private:
  BackboneSpec spec_;
  std::vector<nn::Parameter> conv_w_;
  std::vector<nn::Parameter> conv_b_;
  // toy-mode bottleneck
  nn::Parameter squeeze_w_, squeeze_b_, expand_w_, expand_b_;
};

}  // namespace opr::model
