#pragma once

#include <random>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

namespace opr::eval {

enum class PerturbationFamily { BlockMask, GaussianNoise, Shift };

std::string_view to_string(PerturbationFamily f);
PerturbationFamily family_from_string(std::string_view s);

struct PerturbationSpec {
  PerturbationFamily family = PerturbationFamily::BlockMask;
  // BlockMask: ceil(ratio * grid^2) cells zeroed.
  double block_ratio = 0.1;
  int grid = 4;
  // GaussianNoise: variance drawn uniformly per image, in pixel levels^2.
  double noise_var_min = 10.0;
  double noise_var_max = 50.0;
  // Shift: offsets uniform in [-shift_max, shift_max] per axis, given for a
  // reference_size image and scaled linearly to the actual width/height.
  double shift_max = 50.0;
  int reference_size = 256;
  int repeats = 10;
};

// The three families with default parameters.
std::vector<PerturbationSpec> default_suite();

int block_mask_cells(const PerturbationSpec& spec);

cv::Mat perturb(const cv::Mat& image, const PerturbationSpec& spec, std::mt19937_64& rng);

// Deterministic pieces, exposed for tests.
cv::Mat zero_cells(const cv::Mat& image, int grid, const std::vector<int>& cells);
cv::Mat add_gaussian_noise(const cv::Mat& image, double variance, std::mt19937_64& rng);
// Content moves by (dx, dy); uncovered pixels replicate the edge.
cv::Mat shift_image(const cv::Mat& image, int dx, int dy);

}  // namespace opr::eval
