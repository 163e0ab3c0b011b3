#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

// Oriented-anchor label schema: the four anchor kinds, the cumulative
// three-attribute labels, the alternative classification strategies, and the
// alternative latent organizations.
namespace opr::labels {

enum class AnchorKind : int { Real = 0, Sbi = 1, Cbi = 2, Deepfake = 3 };

inline constexpr std::array<AnchorKind, 4> kAllAnchors = {AnchorKind::Real, AnchorKind::Sbi,
                                                          AnchorKind::Cbi, AnchorKind::Deepfake};

enum class StrategyKind { TripletBinary, MultiLabel, MultiClass };

// R2B2D: real -> blendfake -> deepfake (the default).
// R2D2B: real -> deepfake -> blendfake.
// Surround: every fake kind one attribute away from real.
enum class Organization { R2B2D, R2D2B, Surround };

// Likelihoods of (blending clue, identity inconsistency, generative artifact).
// Hard {0,1} at anchors; real-valued after feature bridging.
struct AttributeLabel {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;

  std::array<double, 3> as_array() const { return {a0, a1, a2}; }
  friend bool operator==(const AttributeLabel&, const AttributeLabel&) = default;
};

// 0 = real, 1 = fake (every blendfake and deepfake kind).
struct DetectionLabel {
  int y = 0;
  friend bool operator==(const DetectionLabel&, const DetectionLabel&) = default;
};

// Maps AnchorKind index -> one-hot position for the multi-class encoding.
// Any permutation is a valid encoding; the classes carry no order.
using ClassPermutation = std::array<int, 4>;
inline constexpr ClassPermutation kIdentityPermutation = {0, 1, 2, 3};

// Target vector for one strategy: 3 attribute likelihoods (TripletBinary,
// MultiLabel) or a 4-way class distribution (MultiClass).
struct LabelRecord {
  StrategyKind strategy = StrategyKind::TripletBinary;
  std::vector<double> values;

  AttributeLabel attribute() const;
};

std::string_view to_string(AnchorKind k);
std::string_view to_string(StrategyKind s);
std::string_view to_string(Organization o);
AnchorKind anchor_from_string(std::string_view s);
StrategyKind strategy_from_string(std::string_view s);
Organization organization_from_string(std::string_view s);

int anchor_index(AnchorKind k);
AnchorKind anchor_from_index(int i);

// Attribute label of `kind` under an organization variant.
AttributeLabel organization_variant(AnchorKind kind, Organization variant);

LabelRecord label_for(AnchorKind kind, StrategyKind strategy,
                      Organization organization = Organization::R2B2D,
                      const ClassPermutation& permutation = kIdentityPermutation);

DetectionLabel detection_label(AnchorKind kind);

// Forgery accumulation a0 + a1 + a2.
double progressive_rank(const AttributeLabel& label);

// Two anchors are adjacent when their progressive ranks differ by exactly one
// in the active organization.
bool adjacency_check(AnchorKind a, AnchorKind b, Organization variant = Organization::R2B2D);

// Adjacent pairs ordered (less fake, more fake), in a fixed enumeration order.
std::vector<std::pair<AnchorKind, AnchorKind>> adjacent_pairs(Organization variant);

// Transition steps (from, to) along which the noise-conditioned mapper is
// trained: each anchor to every adjacent anchor one rank above it.
std::vector<std::pair<AnchorKind, AnchorKind>> transition_chain(Organization variant);

// Serialized label tables, stored in run metadata and checkpoints.
nlohmann::json label_table_json(StrategyKind strategy, Organization organization,
                                const ClassPermutation& permutation = kIdentityPermutation);

void validate_permutation(const ClassPermutation& permutation);

}  // namespace opr::labels
