#pragma once

#include <random>

#include <opencv2/core.hpp>

#include "opr/train/config.hpp"

namespace opr::train {

// One draw of augmentation parameters. Applied with identical parameters to
// all members of a quad so frame alignment survives augmentation.
struct AugmentDraw {
  bool jpeg = false;
  int jpeg_quality = 100;
  bool brightness_contrast = false;
  double brightness = 0.0;
  double contrast = 1.0;
  bool rotate = false;
  double angle_deg = 0.0;
  bool median_blur = false;
};

AugmentDraw draw_augment(std::mt19937_64& rng, const AugmentConfig& config);
cv::Mat apply_augment(const cv::Mat& image, const AugmentDraw& draw);

}  // namespace opr::train
