#include "opr/eval/latent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "opr/errors.hpp"

namespace opr::eval {
namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
    for (std::size_t k = i; k < j; ++k) r[idx[k]] = avg;
    i = j;
  }
  return r;
}

}  // namespace

void validate_dump(const EmbeddingDump& dump) {
  if (dump.dim <= 0) throw Error("embedding dimension must be positive");
  for (const auto& it : dump.items) {
    if (static_cast<int>(it.vector.size()) != dump.dim) {
      throw ShapeMismatchError("embedding '" + it.item_id + "' has " + std::to_string(it.vector.size()) +
                               " components, dump declares " + std::to_string(dump.dim));
    }
    for (double x : it.vector) {
      if (!std::isfinite(x)) throw Error("embedding '" + it.item_id + "' is not finite");
    }
  }
}

void save_dump(const EmbeddingDump& dump, const std::filesystem::path& path) {
  validate_dump(dump);
  std::ofstream out(path);
  if (!out) throw Error("cannot write embedding dump " + path.string());
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "# opr-embeddings v1\n# dim=" << dump.dim << " count=" << dump.items.size()
      << "\n# anchors: 0=real 1=sbi 2=cbi 3=deepfake\nitem_id,anchor";
  for (int k = 0; k < dump.dim; ++k) out << ",e" << k;
  out << '\n';
  for (const auto& it : dump.items) {
    out << it.item_id << ',' << labels::anchor_index(it.kind);
    for (double x : it.vector) out << ',' << x;
    out << '\n';
  }
}

EmbeddingDump load_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding dump " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "# opr-embeddings v1") {
    throw Error(path.string() + " is not a version 1 embedding dump");
  }
  EmbeddingDump dump;
  std::size_t count = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "# dim=%d count=%zu", &dump.dim, &count) != 2) {
    throw Error(path.string() + ": malformed dump header");
  }
  std::getline(in, line);  // anchor legend
  std::getline(in, line);  // column names
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    EmbeddingItem it;
    std::string cell;
    std::getline(row, it.item_id, ',');
    std::getline(row, cell, ',');
    it.kind = labels::anchor_from_index(std::stoi(cell));
    while (std::getline(row, cell, ',')) it.vector.push_back(std::stod(cell));
    dump.items.push_back(std::move(it));
  }
  if (dump.items.size() != count) throw Error(path.string() + ": row count does not match header");
  validate_dump(dump);
  return dump;
}

std::vector<double> dimension_std(const EmbeddingDump& dump) {
  if (dump.items.empty()) throw EmptyDumpError("embedding dump is empty");
  validate_dump(dump);
  const auto d = static_cast<std::size_t>(dump.dim);
  const double n = static_cast<double>(dump.items.size());
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  for (const auto& it : dump.items) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += it.vector[k] / n;
  }
  for (const auto& it : dump.items) {
    for (std::size_t k = 0; k < d; ++k) var[k] += (it.vector[k] - mean[k]) * (it.vector[k] - mean[k]) / n;
  }
  for (double& v : var) v = std::sqrt(v);
  return var;
}

double perturbed_distance(const std::vector<double>& original, const std::vector<std::vector<double>>& perturbed,
                          const std::vector<double>& dim_std, PdForm form) {
  if (perturbed.empty()) throw Error("perturbed_distance needs at least one perturbed embedding");
  if (dim_std.size() != original.size()) throw ShapeMismatchError("std and embedding dimensions differ");
  for (double s : dim_std) {
    if (!(s > 0.0)) throw ZeroStdError("a dimension has zero standard deviation; PD is undefined");
  }
  double total = 0.0;
  for (const auto& p : perturbed) {
    if (p.size() != original.size()) throw ShapeMismatchError("perturbed embedding dimension differs");
    double sq = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double num = form == PdForm::Difference ? p[k] - original[k]
                                                    : std::sqrt(p[k] * p[k] + original[k] * original[k]);
      const double z = num / dim_std[k];
      sq += z * z;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(perturbed.size());
}

double mpd(const EmbeddingDump& dump, const std::vector<std::vector<std::vector<double>>>& perturbed,
           const std::optional<std::vector<double>>& std_override, PdForm form) {
  if (dump.items.empty()) throw EmptyDumpError("embedding dump is empty");
  if (perturbed.size() != dump.items.size()) throw Error("every dump item needs its perturbed embeddings");
  const std::vector<double> s = std_override ? *std_override : dimension_std(dump);
  const std::size_t n = perturbed.front().size();
  double total = 0.0;
  for (std::size_t k = 0; k < dump.items.size(); ++k) {
    if (perturbed[k].size() != n) throw Error("items have differing numbers of perturbed embeddings");
    total += perturbed_distance(dump.items[k].vector, perturbed[k], s, form);
  }
  return total / static_cast<double>(dump.items.size());
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("spearman needs two equal-length samples of size >= 2");
  const auto ra = average_ranks(a), rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateOrderingError("a ranking is constant; correlation undefined");
  return sab / std::sqrt(saa * sbb);
}

double ordering_statistic(const EmbeddingDump& dump) {
  if (dump.items.empty()) throw EmptyDumpError("embedding dump is empty");
  validate_dump(dump);
  const auto d = static_cast<std::size_t>(dump.dim);
  std::array<std::vector<double>, 4> centroid;
  std::array<int, 4> count{};
  for (auto& c : centroid) c.assign(d, 0.0);
  for (const auto& it : dump.items) {
    const auto k = static_cast<std::size_t>(labels::anchor_index(it.kind));
    ++count[k];
    for (std::size_t j = 0; j < d; ++j) centroid[k][j] += it.vector[j];
  }
  int lo = -1, hi = -1;
  for (int k = 0; k < 4; ++k) {
    if (count[k] == 0) continue;
    for (double& x : centroid[k]) x /= count[k];
    if (lo < 0) lo = k;
    hi = k;
  }
  if (lo == hi) throw DegenerateOrderingError("ordering needs at least two anchor kinds");
  std::vector<double> axis(d);
  double norm = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    axis[j] = centroid[hi][j] - centroid[lo][j];
    norm += axis[j] * axis[j];
  }
  if (norm <= 1e-24) throw DegenerateOrderingError("anchor centroids coincide; no ordering axis");
  std::vector<double> rank, proj;
  for (const auto& it : dump.items) {
    rank.push_back(labels::anchor_index(it.kind));
    double p = 0.0;
    for (std::size_t j = 0; j < d; ++j) p += (it.vector[j] - centroid[lo][j]) * axis[j];
    proj.push_back(p);
  }
  return spearman(rank, proj);
}

}  // namespace opr::eval
