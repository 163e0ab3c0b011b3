#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>

#include "opr/data/manifest.hpp"
#include "opr/labels.hpp"
#include "opr/synth/blend.hpp"

namespace opr::synth {

// Four images aligned to one video frame, indexed by AnchorKind:
// real, SBI(real), CBI(real, matched donor), deepfake.
struct AlignedQuad {
  std::array<std::string, 4> frame_ids;
  std::string video_id;
  std::string identity_id;
  std::array<cv::Mat, 4> images;
  std::array<labels::AttributeLabel, 4> labels;
  nlohmann::json metadata = nlohmann::json::object();

  const std::string& frame_id() const { return frame_ids[0]; }
};

struct RealFrame {
  std::string frame_id;
  std::string video_id;
  std::string identity_id;
  cv::Mat image;
  LandmarkSet landmarks;
};

// Real frame plus its manipulated counterpart, read from disk.
struct LoadedFrame {
  RealFrame real;
  cv::Mat deepfake;
};

LoadedFrame load_frame(const data::FrameRecord& record);

enum class CbiFailurePolicy { Drop, SubstituteSbi };

std::string_view to_string(CbiFailurePolicy p);
CbiFailurePolicy policy_from_string(std::string_view s);

struct QuadBuilderConfig {
  SynthConfig synth;
  // Candidates drawn (without replacement) from the donor pool before the
  // landmark match; 0 uses the whole pool.
  int pool_size = 0;
  CbiFailurePolicy policy = CbiFailurePolicy::Drop;
  labels::Organization organization = labels::Organization::R2B2D;
};

// Builds quads against a fixed CBI donor pool. Donors never share the query
// frame's identity. Not thread-safe: the drop and substitution counters are
// plain members.
class QuadBuilder {
 public:
  QuadBuilder(std::vector<RealFrame> donor_pool, QuadBuilderConfig config);

  // Returns nullopt when the quad is dropped (counted in dropped()).
  std::optional<AlignedQuad> build_aligned_quad(const RealFrame& frame, const cv::Mat& deepfake_image,
                                                std::uint64_t seed);

  int dropped() const { return dropped_; }
  int substituted() const { return substituted_; }
  const QuadBuilderConfig& config() const { return config_; }

 private:
  std::vector<RealFrame> pool_;
  std::vector<PoolEntry> entries_;
  QuadBuilderConfig config_;
  int dropped_ = 0;
  int substituted_ = 0;
};

// Per-frame seed that depends only on (seed, frame_id), not on visit order.
std::uint64_t frame_seed(std::uint64_t seed, const std::string& frame_id);

// Loads every record, builds the donor pool from the train split only, and
// returns the quads for `split`. Dropped quads are reported via `dropped`.
std::vector<AlignedQuad> build_quads(const std::vector<data::FrameRecord>& records, data::Split split,
                                     std::uint64_t seed, const QuadBuilderConfig& config, int* dropped = nullptr,
                                     int* substituted = nullptr);

// Quad dataset on disk: PNGs plus quads.json
//   {"format": "opr-quads", "version": 1,
//    "quads": [{"frame_id", "video_id", "identity_id",
//               "images": {"real", "sbi", "cbi", "deepfake"},
//               "labels": [[a0,a1,a2] x4], "metadata": {...}}]}
std::filesystem::path write_quads(const std::vector<AlignedQuad>& quads, const std::filesystem::path& out_dir);
std::vector<AlignedQuad> read_quads(const std::filesystem::path& quads_json);

}  // namespace opr::synth
