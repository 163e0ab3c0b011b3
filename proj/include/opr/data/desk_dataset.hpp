#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>
#include <opencv2/core.hpp>

#include "opr/synth/landmarks.hpp"

// Procedural desk-scale dataset. Each "video" renders one synthetic face
// identity under small pose changes; its "deepfake" replaces the inner face
// with a forged region carrying three controllable cues that mirror the three
// forgery attributes: a blending boundary, an identity (texture) mismatch and
// a high-frequency generative artifact.
namespace opr::data {

enum class ArtifactKind { Checkerboard, Stripes, Speckle };

std::string_view to_string(ArtifactKind k);
ArtifactKind artifact_from_string(std::string_view s);

struct CueStrengths {
  double boundary = 14.0;   // colour offset inside the forged region, pixel levels
  double identity = 0.8;    // fraction of the donor identity's texture
  double artifact = 10.0;   // amplitude of the high-frequency pattern, pixel levels
};

void to_json(nlohmann::json& j, const CueStrengths& c);
void from_json(const nlohmann::json& j, CueStrengths& c);

struct DeskSpec {
  int image_size = 32;
  int train_videos = 50;
  int test_videos = 20;
  int frames_per_video = 10;
  int test_frames_per_video = 5;
  std::uint64_t seed = 0;
  CueStrengths train_cues;
  CueStrengths test_cues;
  ArtifactKind train_artifact = ArtifactKind::Checkerboard;
  // The held-out split uses a different artifact kind (cue shift).
  ArtifactKind test_artifact = ArtifactKind::Speckle;
  std::string dataset = "desk";
};

void to_json(nlohmann::json& j, const DeskSpec& s);
void from_json(const nlohmann::json& j, DeskSpec& s);

inline constexpr int kTemplateLandmarks = 81;

// Face placement within one frame.
struct FaceGeometry {
  double cx = 0, cy = 0;   // centre, pixels
  double rx = 0, ry = 0;   // face ellipse radii, pixels
  double angle = 0;        // radians
};

// Canonical 81-point template placed by `geometry`.
synth::LandmarkSet template_landmarks(const FaceGeometry& geometry);

struct IdentityLook {
  cv::Vec3d skin;
  cv::Vec3d background;
  cv::Vec3d eyes;
  cv::Vec3d mouth;
  // Low-frequency skin texture: three plane waves in face coordinates.
  std::array<cv::Vec3d, 3> waves;  // (fx, fy, phase)
  double texture_amplitude = 0;
};

IdentityLook random_look(std::uint64_t seed);
cv::Mat render_face(const IdentityLook& look, const FaceGeometry& geometry, cv::Size size,
                    std::uint64_t noise_seed);

// Forged counterpart of `real`. With every strength at zero the result equals
// `real` pixel for pixel.
cv::Mat forge_face(const cv::Mat& real, const IdentityLook& donor, const FaceGeometry& geometry,
                   const CueStrengths& cues, ArtifactKind artifact, std::uint64_t seed);

// Writes PNG frames, landmark files and manifest.json under out_dir and
// returns the manifest path. Deterministic in spec.seed.
std::filesystem::path synth_desk_dataset(const DeskSpec& spec, const std::filesystem::path& out_dir);

// Laplacian energy inside the face region: a fixed, training-free baseline
// score used to probe cue strength.
double laplacian_energy_score(const cv::Mat& image);

}  // namespace opr::data
