#include "opr/eval/pipeline.hpp"

#include <random>

#include <opencv2/imgcodecs.hpp>

#include "opr/data/image.hpp"
#include "opr/errors.hpp"

namespace opr::eval {
namespace {

std::vector<double> to_vector(const nn::Tensor& t) { return {t.values().begin(), t.values().end()}; }

double score_file(const model::OprModel& model, const std::filesystem::path& p, bool use_attention) {
  cv::Mat img = cv::imread(p.string(), cv::IMREAD_COLOR);
  if (img.empty()) throw Error("cannot read image " + p.string());
  return model.score(data::image_to_tensor(img, model.input_size()), use_attention);
}

}  // namespace

ScoreSet score_frames(const model::OprModel& model, const std::vector<data::FrameRecord>& records,
                      bool use_attention) {
  ScoreSet out;
  out.reserve(2 * records.size());
  for (const auto& r : records) {
    out.push_back({r.frame_id + "/real", r.video_id + "/real", score_file(model, r.real_path, use_attention), 0});
    out.push_back({r.frame_id + "/fake", r.video_id + "/fake", score_file(model, r.deepfake_path, use_attention), 1});
  }
  return out;
}

nlohmann::json evaluate_by_dataset(const model::OprModel& model, const std::vector<data::FrameRecord>& records,
                                   bool use_attention) {
  std::map<std::string, std::vector<data::FrameRecord>> groups;
  for (const auto& r : records) groups[r.dataset].push_back(r);
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, recs] : groups) {
    const ScoreSet s = score_frames(model, recs, use_attention);
    out[name] = {{"auc", auc(s)}, {"eer", eer(s)}, {"video_auc", video_auc(s)}, {"frames", recs.size()}};
  }
  return out;
}

EmbeddingDump embed_quads(const model::OprModel& model, const std::vector<synth::AlignedQuad>& quads) {
  EmbeddingDump dump;
  for (const auto& q : quads) {
    for (auto k : labels::kAllAnchors) {
      const auto& img = q.images[static_cast<std::size_t>(labels::anchor_index(k))];
      auto v = to_vector(model.embed(data::image_to_tensor(img, model.input_size())));
      dump.dim = static_cast<int>(v.size());
      dump.items.push_back({q.frame_id() + "/" + std::string(labels::to_string(k)), k, std::move(v)});
    }
  }
  return dump;
}

MpdReport mpd_suite(const model::OprModel& model, const std::vector<synth::AlignedQuad>& quads,
                    const std::vector<PerturbationSpec>& suite, std::uint64_t seed, PdForm form) {
  if (suite.empty()) throw Error("perturbation suite is empty");
  const EmbeddingDump dump = embed_quads(model, quads);
  const std::vector<double> s = dimension_std(dump);
  MpdReport report;
  for (const auto& spec : suite) {
    if (spec.repeats <= 0) throw Error("perturbation repeats must be positive");
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(spec.family) + 1)));
    std::vector<std::vector<std::vector<double>>> perturbed;
    perturbed.reserve(dump.items.size());
    for (const auto& q : quads) {
      for (auto k : labels::kAllAnchors) {
        const auto& img = q.images[static_cast<std::size_t>(labels::anchor_index(k))];
        std::vector<std::vector<double>> reps;
        for (int r = 0; r < spec.repeats; ++r) {
          reps.push_back(to_vector(model.embed(data::image_to_tensor(perturb(img, spec, rng), model.input_size()))));
        }
        perturbed.push_back(std::move(reps));
      }
    }
    const double v = mpd(dump, perturbed, s, form);
    report.per_family[std::string(to_string(spec.family))] = v;
    report.mean += v / static_cast<double>(suite.size());
  }
  return report;
}

}  // namespace opr::eval
