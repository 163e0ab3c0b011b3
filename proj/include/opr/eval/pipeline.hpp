#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opr/data/manifest.hpp"
#include "opr/eval/latent.hpp"
#include "opr/eval/metrics.hpp"
#include "opr/eval/perturb.hpp"
#include "opr/model/opr_model.hpp"
#include "opr/synth/quad.hpp"

// Model-facing evaluation glue shared by the CLI and the acceptance suite.
namespace opr::eval {

// Real frames score as label 0 and deepfakes as label 1. Video ids get a
// "/real" or "/fake" suffix so each video-level item has one label.
ScoreSet score_frames(const model::OprModel& model, const std::vector<data::FrameRecord>& records,
                      bool use_attention);

// {dataset: {"auc", "eer", "video_auc", "frames"}} over the given records.
nlohmann::json evaluate_by_dataset(const model::OprModel& model, const std::vector<data::FrameRecord>& records,
                                   bool use_attention);

// One item per quad member, id "<frame_id>/<anchor>".
EmbeddingDump embed_quads(const model::OprModel& model, const std::vector<synth::AlignedQuad>& quads);

struct MpdReport {
  std::map<std::string, double> per_family;
  double mean = 0.0;
};

// mPD of the quad embeddings under each perturbation family; the std is
// taken over the unperturbed dump.
MpdReport mpd_suite(const model::OprModel& model, const std::vector<synth::AlignedQuad>& quads,
                    const std::vector<PerturbationSpec>& suite, std::uint64_t seed,
                    PdForm form = PdForm::Difference);

}  // namespace opr::eval
