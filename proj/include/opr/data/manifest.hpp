#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

// Frame manifests: one record per video frame pairing a real crop with its
// manipulated counterpart and the landmark file of the real crop.
namespace opr::data {

inline constexpr std::string_view kManifestFormat = "opr-manifest";
inline constexpr int kManifestVersion = 1;

enum class Split { Train, Test };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct FrameRecord {
  std::string frame_id;
  std::string video_id;
  std::string identity_id;
  // Absolute after load_manifest; written relative to the manifest directory.
  std::filesystem::path real_path;
  std::filesystem::path deepfake_path;
  std::filesystem::path landmark_path;
  Split split = Split::Train;
  std::string dataset = "default";
};

struct ManifestCheck {
  bool require_files = true;
};

// Throws DuplicateFrameError, MissingFilesError (listing every unresolved
// path), SplitLeakError (a video in both splits), or ManifestError for schema
// and identity-consistency problems.
std::vector<FrameRecord> load_manifest(const std::filesystem::path& path, ManifestCheck check = {});
void save_manifest(const std::vector<FrameRecord>& records, const std::filesystem::path& path);

// The checks load_manifest applies, exposed for records built in memory.
void validate_records(const std::vector<FrameRecord>& records, bool require_files);

std::vector<FrameRecord> filter_split(const std::vector<FrameRecord>& records, Split split);

}  // namespace opr::data
