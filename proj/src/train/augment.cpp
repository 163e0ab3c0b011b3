#include "opr/train/augment.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace opr::train {

AugmentDraw draw_augment(std::mt19937_64& rng, const AugmentConfig& c) {
  AugmentDraw d;
  if (!c.enabled) return d;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Every field is drawn unconditionally so the stream length is fixed.
  const double p_jpeg = u01(rng), p_bc = u01(rng), p_rot = u01(rng), p_med = u01(rng);
  const int quality = std::uniform_int_distribution<int>(c.jpeg_quality_min, c.jpeg_quality_max)(rng);
  const double brightness = std::uniform_real_distribution<double>(-c.brightness_max, c.brightness_max)(rng);
  const double contrast = 1.0 + std::uniform_real_distribution<double>(-c.contrast_max, c.contrast_max)(rng);
  const double angle = std::uniform_real_distribution<double>(-c.rotation_max_deg, c.rotation_max_deg)(rng);
  d.jpeg = p_jpeg < c.jpeg_prob;
  d.jpeg_quality = quality;
  d.brightness_contrast = p_bc < c.brightness_contrast_prob;
  d.brightness = brightness;
  d.contrast = contrast;
  d.rotate = p_rot < c.rotation_prob;
  d.angle_deg = angle;
  d.median_blur = p_med < c.median_blur_prob;
  return d;
}

cv::Mat apply_augment(const cv::Mat& image, const AugmentDraw& d) {
  cv::Mat out = image.clone();
  if (d.rotate) {
    const cv::Point2f centre(out.cols / 2.0f, out.rows / 2.0f);
    cv::warpAffine(out, out, cv::getRotationMatrix2D(centre, d.angle_deg, 1.0), out.size(), cv::INTER_LINEAR,
                   cv::BORDER_REFLECT);
  }
  if (d.brightness_contrast) out.convertTo(out, -1, d.contrast, d.brightness);
  if (d.median_blur) cv::medianBlur(out, out, 3);
  if (d.jpeg) {
    std::vector<uchar> buf;
    cv::imencode(".jpg", out, buf, {cv::IMWRITE_JPEG_QUALITY, d.jpeg_quality});
    out = cv::imdecode(buf, cv::IMREAD_COLOR);
  }
  return out;
}

}  // namespace opr::train
