#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "opr/labels.hpp"

// Latent-space diagnostics over embedding dumps.
namespace opr::eval {

struct EmbeddingItem {
  std::string item_id;
  labels::AnchorKind kind = labels::AnchorKind::Real;
  std::vector<double> vector;
};

struct EmbeddingDump {
  int dim = 0;
  std::vector<EmbeddingItem> items;
};

// Text format, version 1:
//   # opr-embeddings v1
//   # dim=<d> count=<n>
//   # anchors: 0=real 1=sbi 2=cbi 3=deepfake
//   item_id,anchor,e0,...,e<d-1>
//   <rows>
void save_dump(const EmbeddingDump& dump, const std::filesystem::path& path);
EmbeddingDump load_dump(const std::filesystem::path& path);

// Throws unless every vector has `dim` finite entries.
void validate_dump(const EmbeddingDump& dump);

// Population standard deviation of each dimension. Throws EmptyDumpError.
std::vector<double> dimension_std(const EmbeddingDump& dump);

enum class PdForm {
  Difference,  // || (F_i - F) / std ||, the distance the prose describes
  Printed,     // || sqrt(F_i^2 + F^2) / std ||, the formula as typeset
};

// PD = (1/n) sum_i || form(F_i, F) / std ||_2. Throws ZeroStdError when a
// std entry is not positive.
double perturbed_distance(const std::vector<double>& original, const std::vector<std::vector<double>>& perturbed,
                          const std::vector<double>& dim_std, PdForm form = PdForm::Difference);

// Mean PD over the dump. perturbed[k] holds item k's perturbed embeddings.
// The std comes from the original dump unless `std_override` is given.
double mpd(const EmbeddingDump& dump, const std::vector<std::vector<std::vector<double>>>& perturbed,
           const std::optional<std::vector<double>>& std_override = std::nullopt, PdForm form = PdForm::Difference);

// Spearman correlation between anchor index and each embedding's projection
// onto the axis from the least-fake to the most-fake anchor centroid present
// (real -> deepfake for a full dump). +1 means perfectly progressive.
double ordering_statistic(const EmbeddingDump& dump);

// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace opr::eval
