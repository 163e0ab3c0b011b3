#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "opr/labels.hpp"
#include "opr/losses.hpp"
#include "opr/model/opr_model.hpp"
#include "opr/synth/quad.hpp"
#include "opr/train/adam.hpp"
#include "opr/train/config.hpp"

namespace opr::train {

// The anchors of one quad that a variant trains on, with their targets.
struct VariantQuad {
  std::string frame_id;
  std::vector<labels::AnchorKind> kinds;
  std::vector<cv::Mat> images;
  std::vector<labels::LabelRecord> attribute_targets;  // empty for binary variants
  std::vector<labels::DetectionLabel> detection_targets;
  bool attribute_loss = false;
  bool transition_loss = false;
  bool bridging = false;
};

// Full keeps all four anchors with attribute labels; VHT all four with
// detection labels only; BFOnly {real, SBI, CBI}; DFOnly {real, deepfake}.
VariantQuad assemble_variant_batch(const synth::AlignedQuad& quad, const RunConfig& config);

struct StepReport {
  int epoch = 0;
  long step = 0;
  loss::LossReport loss;
  int bridged = 0;
  int anchors = 0;
};

struct EpochSummary {
  int epoch = 0;
  std::vector<StepReport> steps;
  int bridged = 0;
  loss::LossReport mean;
};

// JSONL per step and CSV per epoch. Either path may be empty.
class TrainLog {
 public:
  TrainLog(const std::filesystem::path& jsonl, const std::filesystem::path& csv, bool append = false);
  void step(const StepReport& r, const loss::LossWeights& w);
  void epoch(const EpochSummary& s);

 private:
  std::ofstream jsonl_, csv_;
};

inline constexpr std::string_view kCheckpointFormat = "opr-checkpoint";
inline constexpr int kCheckpointVersion = 1;

class Trainer {
 public:
  explicit Trainer(RunConfig config);

  const RunConfig& config() const { return config_; }
  model::OprModel& model() { return *model_; }
  const model::OprModel& model() const { return *model_; }
  int epoch() const { return epoch_; }
  long step() const { return step_; }
  const std::mt19937_64& rng() const { return rng_; }

  // One pass over `quads` in a seeded shuffled order, one optimizer step per
  // batch_quads quads. Throws NanLossError naming the batch frame ids if a
  // loss is not finite; parameters are left as they were before that step.
  EpochSummary train_epoch(const std::vector<synth::AlignedQuad>& quads, TrainLog* log = nullptr);

  // Records the batch losses on `g` and returns the report plus the
  // L_overall node. Consumes `rng` exactly as a training step would.
  StepReport forward_batch(nn::Graph& g, const std::vector<const synth::AlignedQuad*>& batch,
                           std::mt19937_64& rng, nn::Var* overall) const;
  // Loss report of one batch without updating anything; draws from a copy of
  // the trainer's generator.
  StepReport evaluate_batch(const std::vector<const synth::AlignedQuad*>& batch) const;

  void save_checkpoint(const std::filesystem::path& path) const;
  // Throws CheckpointVersionError, CheckpointMismatchError (when `expected`
  // disagrees on strategy, organization, variant or backbone) or
  // CheckpointError for unreadable files.
  static std::unique_ptr<Trainer> restore(const std::filesystem::path& path,
                                          const std::optional<RunConfig>& expected = std::nullopt);

  std::unique_ptr<model::OprModel> release_model() { return std::move(model_); }

 private:

  RunConfig config_;
  std::unique_ptr<model::OprModel> model_;
  std::unique_ptr<Adam> optimizer_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
  long step_ = 0;
};

// Plain-tensor model checkpoint readers for evaluation tools.
std::unique_ptr<model::OprModel> load_model(const std::filesystem::path& checkpoint, RunConfig* config = nullptr);

}  // namespace opr::train
