#include "opr/data/image.hpp"

#include <opencv2/imgproc.hpp>

#include "opr/errors.hpp"

namespace opr::data {

nn::Tensor image_to_tensor(const cv::Mat& image, int size) {
  if (image.empty() || image.type() != CV_8UC3) throw ShapeMismatchError("expected an 8-bit 3-channel image");
  cv::Mat src = image;
  if (image.rows != size || image.cols != size) cv::resize(image, src, cv::Size(size, size), 0, 0, cv::INTER_AREA);
  nn::Tensor t({size, size, 3});
  double* d = t.data();
  for (int y = 0; y < size; ++y) {
    const auto* row = src.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size; ++x) {
      for (int c = 0; c < 3; ++c) *d++ = row[x][c] / 127.5 - 1.0;
    }
  }
  return t;
}

}  // namespace opr::data
