#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

namespace opr::synth {

// Ordered facial landmarks in pixel coordinates. The count is fixed across a
// dataset (81 for the usual shape predictor).
struct LandmarkSet {
  std::vector<cv::Point2d> points;

  std::size_t count() const { return points.size(); }
  cv::Point2d centroid() const;
};

// Throws opr::Error if any point lies outside [0, width) x [0, height).
void validate_landmarks(const LandmarkSet& landmarks, cv::Size image_size);

// Plain text: one "x y" row per point.
LandmarkSet load_landmarks(const std::filesystem::path& path);
void save_landmarks(const LandmarkSet& landmarks, const std::filesystem::path& path);

// Mean Euclidean distance between corresponding points after subtracting
// each set's centroid (translation-only alignment).
double landmark_distance(const LandmarkSet& a, const LandmarkSet& b);

struct PoolEntry {
  std::string frame_id;
  std::string identity_id;
  LandmarkSet landmarks;
};

struct LandmarkMatch {
  std::string frame_id;
  double distance = 0.0;
};

// Nearest pool entry by landmark_distance, skipping entries whose identity is
// `exclude_identity` (when non-empty). Ties go to the lexicographically lowest
// frame_id. Throws EmptyPoolError when nothing is left after exclusion.
LandmarkMatch find_landmark_match(const LandmarkSet& query, const std::vector<PoolEntry>& pool,
                                  std::string_view exclude_identity = {});

}  // namespace opr::synth
