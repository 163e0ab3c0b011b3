// opr: command-line front end for blendfake synthesis, desk data generation,
// training, evaluation and latent-space analysis.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "opr/data/desk_dataset.hpp"
#include "opr/data/manifest.hpp"
#include "opr/errors.hpp"
#include "opr/eval/latent.hpp"
#include "opr/eval/pipeline.hpp"
#include "opr/eval/plots.hpp"
#include "opr/synth/quad.hpp"
#include "opr/train/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw opr::Error("cannot open " + p.string());
  return json::parse(in);
}

void write_json(const json& j, const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw opr::Error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

opr::data::Split parse_split(const std::string& s) { return opr::data::split_from_string(s); }

struct QuadFlags {
  int pool_size = opr::synth::QuadBuilderConfig{}.pool_size;
  std::string policy = "drop";
  std::string synth_config;

  opr::synth::QuadBuilderConfig make(opr::labels::Organization org) const {
    opr::synth::QuadBuilderConfig c;
    if (!synth_config.empty()) c.synth = read_json(synth_config).get<opr::synth::SynthConfig>();
    c.pool_size = pool_size;
    c.policy = opr::synth::policy_from_string(policy);
    c.organization = org;
    return c;
  }

  void add(CLI::App* app) {
    app->add_option("--pool-size", pool_size, "CBI donor candidates per frame (0 = whole train split)");
    app->add_option("--policy", policy, "CBI failure policy: drop | substitute-sbi");
    app->add_option("--synth-config", synth_config, "JSON file overriding the blend recipe parameters");
  }
};

std::vector<opr::synth::AlignedQuad> quads_for(const fs::path& manifest, opr::data::Split split,
                                               std::uint64_t seed, const opr::synth::QuadBuilderConfig& qc) {
  const auto records = opr::data::load_manifest(manifest);
  int dropped = 0, substituted = 0;
  auto quads = opr::synth::build_quads(records, split, seed, qc, &dropped, &substituted);
  std::fprintf(stderr, "built %zu %s quads (%d dropped, %d substituted)\n", quads.size(),
               std::string(opr::data::to_string(split)).c_str(), dropped, substituted);
  return quads;
}

void run_training(opr::train::Trainer& trainer, const std::vector<opr::synth::AlignedQuad>& quads,
                  const fs::path& out, int total_epochs, bool append_logs) {
  opr::train::TrainLog log(out / "steps.jsonl", out / "epochs.csv", append_logs);
  while (trainer.epoch() < total_epochs) {
    const auto s = trainer.train_epoch(quads, &log);
    std::fprintf(stderr, "epoch %d  l_overall %.5f  l_d %.5f  l_o %.5f  l_t %.5f  bridged %d\n", s.epoch,
                 s.mean.l_overall, s.mean.l_d, s.mean.l_o, s.mean.l_t, s.bridged);
    trainer.save_checkpoint(out / ("checkpoint_epoch" + std::to_string(trainer.epoch()) + ".json"));
    trainer.save_checkpoint(out / "checkpoint_last.json");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oriented progressive regularization: synthesis, training and analysis"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Build aligned quads (real, SBI, CBI, deepfake) from a frame manifest");
  std::string s_manifest, s_out, s_split = "train", s_org = "R2B2D";
  std::uint64_t s_seed = 0;
  QuadFlags s_quad;
  synth->add_option("--manifest", s_manifest, "Frame manifest")->required();
  synth->add_option("--out", s_out, "Output directory")->required();
  synth->add_option("--seed", s_seed, "Synthesis seed");
  synth->add_option("--split", s_split, "Split to build quads for: train | test");
  synth->add_option("--organization", s_org, "Label organization: R2B2D | R2D2B | Surround");
  s_quad.add(synth);

  // make-desk-data
  auto* desk = app.add_subcommand("make-desk-data", "Generate the procedural desk-scale dataset");
  opr::data::DeskSpec d_spec;
  std::string d_out, d_spec_file, d_train_art, d_test_art;
  desk->add_option("--out", d_out, "Output directory")->required();
  desk->add_option("--spec", d_spec_file, "JSON spec; flags below override it");
  desk->add_option("--seed", d_spec.seed, "Generator seed");
  desk->add_option("--size", d_spec.image_size, "Image side in pixels");
  desk->add_option("--train-videos", d_spec.train_videos);
  desk->add_option("--test-videos", d_spec.test_videos);
  desk->add_option("--frames", d_spec.frames_per_video, "Frames per train video");
  desk->add_option("--test-frames", d_spec.test_frames_per_video, "Frames per test video");
  desk->add_option("--boundary", d_spec.train_cues.boundary, "Train blending-boundary strength");
  desk->add_option("--identity", d_spec.train_cues.identity, "Train identity-mismatch strength");
  desk->add_option("--artifact", d_spec.train_cues.artifact, "Train artifact strength");
  desk->add_option("--train-artifact", d_train_art, "checkerboard | stripes | speckle");
  desk->add_option("--test-artifact", d_test_art, "checkerboard | stripes | speckle");

  // train
  auto* train = app.add_subcommand("train", "Train a model from a frame manifest");
  std::string t_config, t_manifest, t_out, t_variant, t_strategy, t_org;
  std::optional<int> t_epochs, t_batch, t_warmup, t_input;
  std::optional<double> t_lr, t_beta, t_gamma;
  std::optional<std::uint64_t> t_seed;
  bool t_toy = false, t_no_aug = false;
  QuadFlags t_quad;
  train->add_option("--config", t_config, "Run config JSON (every field optional)");
  train->add_option("--manifest", t_manifest, "Frame manifest")->required();
  train->add_option("--out", t_out, "Run directory")->required();
  train->add_option("--epochs", t_epochs);
  train->add_option("--batch-quads", t_batch);
  train->add_option("--warmup", t_warmup, "Warm-up epochs before feature bridging");
  train->add_option("--input-size", t_input);
  train->add_option("--lr", t_lr);
  train->add_option("--beta", t_beta);
  train->add_option("--gamma", t_gamma);
  train->add_option("--seed", t_seed);
  train->add_option("--variant", t_variant, "full | bf-only | df-only | vht");
  train->add_option("--strategy", t_strategy, "triplet_binary | multi_label | multi_class");
  train->add_option("--organization", t_org, "R2B2D | R2D2B | Surround");
  train->add_flag("--toy", t_toy, "Add the 2-D embedding bottleneck");
  train->add_flag("--no-augment", t_no_aug, "Disable data augmentation");
  t_quad.add(train);

  // resume
  auto* resume = app.add_subcommand("resume", "Continue a run from a checkpoint");
  std::string r_ckpt, r_manifest, r_out;
  int r_epochs = -1;
  QuadFlags r_quad;
  resume->add_option("--checkpoint", r_ckpt)->required();
  resume->add_option("--manifest", r_manifest)->required();
  resume->add_option("--out", r_out, "Run directory (defaults to the checkpoint's)");
  resume->add_option("--epochs", r_epochs, "Total epochs to reach (defaults to the config's)");
  r_quad.add(resume);

  // export-embeddings
  auto* exp = app.add_subcommand("export-embeddings", "Write the embedding dump of a split's quads");
  std::string e_ckpt, e_manifest, e_out, e_split = "test";
  QuadFlags e_quad;
  exp->add_option("--checkpoint", e_ckpt)->required();
  exp->add_option("--manifest", e_manifest)->required();
  exp->add_option("--out", e_out, "Dump file")->required();
  exp->add_option("--split", e_split);
  e_quad.add(exp);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Frame AUC, EER and video AUC per dataset tag");
  std::string v_ckpt, v_manifest, v_out, v_split = "test";
  evaluate->add_option("--checkpoint", v_ckpt)->required();
  evaluate->add_option("--manifest", v_manifest)->required();
  evaluate->add_option("--out", v_out, "Metrics JSON (stdout when omitted)");
  evaluate->add_option("--split", v_split);

  // analyze-latent
  auto* analyze = app.add_subcommand("analyze-latent", "Embedding dump, mPD report, ordering statistic and plots");
  std::string a_ckpt, a_manifest, a_out, a_split = "test";
  int a_repeats = 10;
  std::uint64_t a_seed = 0;
  bool a_printed = false;
  QuadFlags a_quad;
  analyze->add_option("--checkpoint", a_ckpt)->required();
  analyze->add_option("--manifest", a_manifest)->required();
  analyze->add_option("--out", a_out, "Output directory")->required();
  analyze->add_option("--split", a_split);
  analyze->add_option("--repeats", a_repeats, "Perturbed copies per item and family");
  analyze->add_option("--seed", a_seed, "Perturbation seed");
  analyze->add_flag("--printed-pd", a_printed, "Use the typeset sqrt(F_i^2 + F^2) PD form instead of the distance");
  a_quad.add(analyze);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto org = opr::labels::organization_from_string(s_org);
      const auto quads = quads_for(s_manifest, parse_split(s_split), s_seed, s_quad.make(org));
      const auto path = opr::synth::write_quads(quads, s_out);
      std::printf("%s\n", path.string().c_str());
    } else if (*desk) {
      opr::data::DeskSpec spec = d_spec;
      if (!d_spec_file.empty()) {
        spec = read_json(d_spec_file).get<opr::data::DeskSpec>();
        // explicit flags still win
        for (const auto* opt : desk->get_options()) {
          if (opt->count() == 0) continue;
          const std::string n = opt->get_name();
          if (n == "--seed") spec.seed = d_spec.seed;
          if (n == "--size") spec.image_size = d_spec.image_size;
          if (n == "--train-videos") spec.train_videos = d_spec.train_videos;
          if (n == "--test-videos") spec.test_videos = d_spec.test_videos;
          if (n == "--frames") spec.frames_per_video = d_spec.frames_per_video;
          if (n == "--test-frames") spec.test_frames_per_video = d_spec.test_frames_per_video;
          if (n == "--boundary") spec.train_cues.boundary = d_spec.train_cues.boundary;
          if (n == "--identity") spec.train_cues.identity = d_spec.train_cues.identity;
          if (n == "--artifact") spec.train_cues.artifact = d_spec.train_cues.artifact;
        }
      }
      if (!d_train_art.empty()) spec.train_artifact = opr::data::artifact_from_string(d_train_art);
      if (!d_test_art.empty()) spec.test_artifact = opr::data::artifact_from_string(d_test_art);
      // Round-trip through JSON to apply the same validation as a spec file.
      spec = json(spec).get<opr::data::DeskSpec>();
      const auto manifest = opr::data::synth_desk_dataset(spec, d_out);
      write_json(json(spec), fs::path(d_out) / "desk_spec.json");
      std::printf("%s\n", manifest.string().c_str());
    } else if (*train) {
      opr::train::RunConfig cfg;
      if (!t_config.empty()) cfg = opr::train::load_run_config(t_config);
      if (t_epochs) cfg.epochs = *t_epochs;
      if (t_batch) cfg.batch_quads = *t_batch;
      if (t_warmup) cfg.warmup_epochs = *t_warmup;
      if (t_input) cfg.backbone.input_size = *t_input;
      if (t_lr) cfg.learning_rate = *t_lr;
      if (t_beta) cfg.weights.beta = *t_beta;
      if (t_gamma) cfg.weights.gamma = *t_gamma;
      if (t_seed) cfg.seed = *t_seed;
      if (!t_variant.empty()) cfg.variant = opr::train::variant_from_string(t_variant);
      if (!t_strategy.empty()) cfg.strategy = opr::labels::strategy_from_string(t_strategy);
      if (!t_org.empty()) cfg.organization = opr::labels::organization_from_string(t_org);
      if (t_toy) cfg.backbone.toy_mode = true;
      if (t_no_aug) cfg.augment.enabled = false;
      cfg.validate();
      fs::create_directories(t_out);
      write_json(json(cfg), fs::path(t_out) / "config.json");
      const auto quads = quads_for(t_manifest, opr::data::Split::Train, cfg.seed, t_quad.make(cfg.organization));
      opr::train::Trainer trainer(cfg);
      std::fprintf(stderr, "config hash %s\n", opr::train::config_hash(cfg).c_str());
      run_training(trainer, quads, t_out, cfg.epochs, false);
    } else if (*resume) {
      auto trainer = opr::train::Trainer::restore(r_ckpt);
      const fs::path out = r_out.empty() ? fs::path(r_ckpt).parent_path() : fs::path(r_out);
      fs::create_directories(out);
      const auto& cfg = trainer->config();
      const auto quads = quads_for(r_manifest, opr::data::Split::Train, cfg.seed, r_quad.make(cfg.organization));
      run_training(*trainer, quads, out, r_epochs >= 0 ? r_epochs : cfg.epochs, true);
    } else if (*exp) {
      opr::train::RunConfig cfg;
      auto model = opr::train::load_model(e_ckpt, &cfg);
      const auto quads = quads_for(e_manifest, parse_split(e_split), cfg.seed, e_quad.make(cfg.organization));
      opr::eval::save_dump(opr::eval::embed_quads(*model, quads), e_out);
      std::printf("%s\n", e_out.c_str());
    } else if (*evaluate) {
      opr::train::RunConfig cfg;
      auto model = opr::train::load_model(v_ckpt, &cfg);
      const auto records = opr::data::filter_split(opr::data::load_manifest(v_manifest), parse_split(v_split));
      json metrics = opr::eval::evaluate_by_dataset(*model, records, cfg.variant == opr::train::Variant::Full);
      metrics["_meta"] = {{"checkpoint", v_ckpt},
                          {"variant", std::string(opr::train::to_string(cfg.variant))},
                          {"config_hash", opr::train::config_hash(cfg)},
                          {"split", v_split}};
      if (v_out.empty()) {
        std::printf("%s\n", metrics.dump(2).c_str());
      } else {
        write_json(metrics, v_out);
      }
    } else if (*analyze) {
      opr::train::RunConfig cfg;
      auto model = opr::train::load_model(a_ckpt, &cfg);
      const auto quads = quads_for(a_manifest, parse_split(a_split), cfg.seed, a_quad.make(cfg.organization));
      const fs::path out(a_out);
      fs::create_directories(out);
      const auto dump = opr::eval::embed_quads(*model, quads);
      opr::eval::save_dump(dump, out / "embeddings.csv");
      auto suite = opr::eval::default_suite();
      for (auto& s : suite) s.repeats = a_repeats;
      const auto form = a_printed ? opr::eval::PdForm::Printed : opr::eval::PdForm::Difference;
      const auto rep = opr::eval::mpd_suite(*model, quads, suite, a_seed, form);
      opr::eval::write_scatter_png(dump, out / "scatter.png");
      opr::eval::write_density_png(dump, out / "density.png");
      opr::eval::write_plot_csv(dump, out / "plot_points.csv");
      json report{{"ordering_statistic", opr::eval::ordering_statistic(dump)},
                  {"mpd", rep.per_family},
                  {"mpd_mean", rep.mean},
                  {"pd_form", a_printed ? "printed" : "difference"},
                  {"items", dump.items.size()},
                  {"dim", dump.dim},
                  {"variant", std::string(opr::train::to_string(cfg.variant))}};
      write_json(report, out / "latent_report.json");
      std::printf("%s\n", report.dump(2).c_str());
    }
  } catch (const opr::NanLossError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
