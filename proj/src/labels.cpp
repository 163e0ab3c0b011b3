#include "opr/labels.hpp"

#include <algorithm>
#include <cmath>

#include "opr/errors.hpp"

namespace opr::labels {

AttributeLabel LabelRecord::attribute() const {
  if (strategy == StrategyKind::MultiClass || values.size() != 3) {
    throw Error("label record does not hold an attribute label");
  }
  return {values[0], values[1], values[2]};
}

std::string_view to_string(AnchorKind k) {
  switch (k) {
    case AnchorKind::Real: return "real";
    case AnchorKind::Sbi: return "sbi";
    case AnchorKind::Cbi: return "cbi";
    case AnchorKind::Deepfake: return "deepfake";
  }
  return "?";
}

std::string_view to_string(StrategyKind s) {
  switch (s) {
    case StrategyKind::TripletBinary: return "triplet_binary";
    case StrategyKind::MultiLabel: return "multi_label";
    case StrategyKind::MultiClass: return "multi_class";
  }
  return "?";
}

std::string_view to_string(Organization o) {
  switch (o) {
    case Organization::R2B2D: return "R2B2D";
    case Organization::R2D2B: return "R2D2B";
    case Organization::Surround: return "Surround";
  }
  return "?";
}

AnchorKind anchor_from_string(std::string_view s) {
  for (AnchorKind k : kAllAnchors)
    if (to_string(k) == s) return k;
  throw ConfigError("unknown anchor kind: " + std::string(s));
}

StrategyKind strategy_from_string(std::string_view s) {
  for (StrategyKind k : {StrategyKind::TripletBinary, StrategyKind::MultiLabel, StrategyKind::MultiClass})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown strategy: " + std::string(s));
}

Organization organization_from_string(std::string_view s) {
  for (Organization o : {Organization::R2B2D, Organization::R2D2B, Organization::Surround})
    if (to_string(o) == s) return o;
  throw ConfigError("unknown organization: " + std::string(s));
}

int anchor_index(AnchorKind k) { return static_cast<int>(k); }

AnchorKind anchor_from_index(int i) {
  if (i < 0 || i > 3) throw Error("anchor index out of range: " + std::to_string(i));
  return static_cast<AnchorKind>(i);
}

AttributeLabel organization_variant(AnchorKind kind, Organization variant) {
  switch (variant) {
    case Organization::R2B2D:
      // Blending clue in SBI/CBI/deepfake; identity inconsistency in
      // CBI/deepfake; generative artifacts in deepfake.
      switch (kind) {
        case AnchorKind::Real: return {0, 0, 0};
        case AnchorKind::Sbi: return {1, 0, 0};
        case AnchorKind::Cbi: return {1, 1, 0};
        case AnchorKind::Deepfake: return {1, 1, 1};
      }
      break;
    case Organization::R2D2B:
      // Deepfake takes the first fake slot; the blendfakes keep their
      // relative order behind it.
      switch (kind) {
        case AnchorKind::Real: return {0, 0, 0};
        case AnchorKind::Deepfake: return {1, 0, 0};
        case AnchorKind::Sbi: return {1, 1, 0};
        case AnchorKind::Cbi: return {1, 1, 1};
      }
      break;
    case Organization::Surround:
      // One distinct attribute per fake kind: all at rank 1 around real.
      switch (kind) {
        case AnchorKind::Real: return {0, 0, 0};
        case AnchorKind::Sbi: return {1, 0, 0};
        case AnchorKind::Cbi: return {0, 1, 0};
        case AnchorKind::Deepfake: return {0, 0, 1};
      }
      break;
  }
  throw Error("unreachable organization/anchor combination");
}

void validate_permutation(const ClassPermutation& permutation) {
  ClassPermutation sorted = permutation;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != kIdentityPermutation) throw ConfigError("class permutation is not a permutation of 0..3");
}

LabelRecord label_for(AnchorKind kind, StrategyKind strategy, Organization organization,
                      const ClassPermutation& permutation) {
  LabelRecord rec;
  rec.strategy = strategy;
  if (strategy == StrategyKind::MultiClass) {
    validate_permutation(permutation);
    rec.values.assign(4, 0.0);
    rec.values[static_cast<std::size_t>(permutation[static_cast<std::size_t>(anchor_index(kind))])] = 1.0;
    return rec;
  }
  const auto a = organization_variant(kind, organization).as_array();
  rec.values.assign(a.begin(), a.end());
  return rec;
}

DetectionLabel detection_label(AnchorKind kind) { return {kind == AnchorKind::Real ? 0 : 1}; }

double progressive_rank(const AttributeLabel& label) { return label.a0 + label.a1 + label.a2; }

bool adjacency_check(AnchorKind a, AnchorKind b, Organization variant) {
  const double ra = progressive_rank(organization_variant(a, variant));
  const double rb = progressive_rank(organization_variant(b, variant));
  return std::abs(ra - rb) == 1.0;
}

std::vector<std::pair<AnchorKind, AnchorKind>> adjacent_pairs(Organization variant) {
  std::vector<std::pair<AnchorKind, AnchorKind>> pairs;
  for (AnchorKind a : kAllAnchors) {
    for (AnchorKind b : kAllAnchors) {
      const double ra = progressive_rank(organization_variant(a, variant));
      const double rb = progressive_rank(organization_variant(b, variant));
      if (rb - ra == 1.0) pairs.emplace_back(a, b);
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [variant](const auto& x, const auto& y) {
    return progressive_rank(organization_variant(x.first, variant)) <
           progressive_rank(organization_variant(y.first, variant));
  });
  return pairs;
}

std::vector<std::pair<AnchorKind, AnchorKind>> transition_chain(Organization variant) {
  return adjacent_pairs(variant);
}

nlohmann::json label_table_json(StrategyKind strategy, Organization organization,
                                const ClassPermutation& permutation) {
  nlohmann::json table = nlohmann::json::object();
  table["strategy"] = std::string(to_string(strategy));
  table["organization"] = std::string(to_string(organization));
  table["class_permutation"] = permutation;
  nlohmann::json rows = nlohmann::json::object();
  for (AnchorKind k : kAllAnchors) {
    rows[std::string(to_string(k))] = label_for(k, strategy, organization, permutation).values;
  }
  table["labels"] = rows;
  nlohmann::json det = nlohmann::json::object();
  for (AnchorKind k : kAllAnchors) det[std::string(to_string(k))] = detection_label(k).y;
  table["detection"] = det;
  return table;
}

}  // namespace opr::labels
