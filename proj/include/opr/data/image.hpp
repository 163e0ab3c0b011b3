#pragma once

#include <opencv2/core.hpp>

#include "opr/nn/tensor.hpp"

namespace opr::data {

// 8-bit BGR image -> (size, size, 3) tensor in [-1, 1], resized with area
// interpolation when the side differs from `size`.
nn::Tensor image_to_tensor(const cv::Mat& image, int size);

}  // namespace opr::data
