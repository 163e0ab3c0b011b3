#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>

#include "opr/synth/landmarks.hpp"

// Blendfake synthesis: self-blended (SBI) and cross-blended (CBI) pseudo-fakes
// built from real face crops and their landmarks.
namespace opr::synth {

// Per-channel mean/std statistics matched inside the mask (Reinhard-style).
struct ColorTransfer {
  bool applied = false;
  std::array<double, 3> source_mean{}, source_std{};
  std::array<double, 3> target_mean{}, target_std{};
};

struct MaskDeform {
  double scale_x = 1.0, scale_y = 1.0;  // hull scaling about its centroid
  double shift_x = 0.0, shift_y = 0.0;  // pixels
  double elastic_amplitude = 0.0;       // pixels
  double erode_px = 0.0;
  double feather_sigma = 0.0;           // pixels
};

struct BlendRecipe {
  cv::Mat mask;  // CV_64FC1 in [0,1], same size as the base image, blend_ratio applied
  ColorTransfer color_transfer;
  MaskDeform deform;
  double blend_ratio = 1.0;
};

enum class BlendKind { Sbi, Cbi };

struct BlendfakeSample {
  cv::Mat image;  // CV_8UC3
  BlendKind kind = BlendKind::Sbi;
  std::string source_frame_id;  // base frame
  std::string donor_frame_id;   // equals source_frame_id for SBI
  BlendRecipe recipe;
};

// Every magnitude below is relative to the face size (hull bounding-box
// diagonal) unless it says otherwise, so one config serves any resolution.
struct SynthConfig {
  // mask
  double hull_scale_jitter = 0.06;
  double hull_shift_jitter = 0.03;
  double elastic_amplitude = 0.04;
  double elastic_smoothness = 0.12;
  double erode_fraction = 0.02;
  double feather_min = 0.02;
  double feather_max = 0.08;
  double blend_ratio_min = 0.6;
  double blend_ratio_max = 1.0;
  // SBI source-variant transforms
  double brightness_jitter = 12.0;   // pixel levels
  double contrast_jitter = 0.10;
  double channel_shift = 10.0;       // pixel levels
  double resize_min = 0.5;           // down-then-up scale factor range
  double resize_max = 1.0;
  double warp_shift = 0.02;          // fraction of image size
  double warp_scale = 0.03;
  // CBI
  bool color_transfer = true;
};

void to_json(nlohmann::json& j, const SynthConfig& c);
void from_json(const nlohmann::json& j, SynthConfig& c);
nlohmann::json recipe_metadata(const BlendRecipe& recipe);

// Test and ablation hooks that pin parts of an otherwise random recipe.
struct BlendOverrides {
  std::optional<cv::Mat> mask;  // CV_64FC1 in [0,1]; replaces the generated mask
  std::optional<double> blend_ratio;
  std::optional<bool> color_transfer;
  bool identity_transform = false;  // SBI: no source-variant jitter; CBI: no warp
};

// Convex hull of the landmarks. Throws DegenerateHullError when the hull is
// empty or collinear.
std::vector<cv::Point2d> face_hull(const LandmarkSet& landmarks);
// Filled hull as CV_8UC1 {0, 255}.
cv::Mat hull_mask(const LandmarkSet& landmarks, cv::Size size);

// Blend mask: hull -> random scale/shift -> elastic warp -> erode -> feather,
// clipped to the hull support and scaled by the blend ratio.
BlendRecipe make_blend_recipe(const LandmarkSet& landmarks, cv::Size size, std::uint64_t seed,
                              const SynthConfig& config, const BlendOverrides& overrides = {});

// out = base + mask * (overlay - base). Pixels where mask == 0 are copied
// from base unchanged.
cv::Mat composite(const cv::Mat& base, const cv::Mat& overlay, const cv::Mat& mask);

ColorTransfer fit_color_transfer(const cv::Mat& source, const cv::Mat& target, const cv::Mat& support);
cv::Mat apply_color_transfer(const cv::Mat& image, const ColorTransfer& transfer);

BlendfakeSample generate_sbi(const cv::Mat& base_image, const LandmarkSet& landmarks, std::uint64_t seed,
                             const SynthConfig& config = {}, const BlendOverrides& overrides = {});

// Throws WarpOutOfBoundsError when the base face region maps outside the
// source image.
BlendfakeSample generate_cbi(const cv::Mat& base_image, const LandmarkSet& base_landmarks,
                             const cv::Mat& source_image, const LandmarkSet& source_landmarks, std::uint64_t seed,
                             const SynthConfig& config = {}, const BlendOverrides& overrides = {});

// Least-squares affine map taking `from` landmarks onto `to` (2x3, CV_64F).
cv::Mat fit_affine(const LandmarkSet& from, const LandmarkSet& to);

}  // namespace opr::synth
