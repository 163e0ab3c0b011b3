#include "opr/eval/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <opencv2/imgproc.hpp>

#include "opr/errors.hpp"

namespace opr::eval {

std::string_view to_string(PerturbationFamily f) {
  switch (f) {
    case PerturbationFamily::BlockMask: return "block-mask";
    case PerturbationFamily::GaussianNoise: return "gaussian-noise";
    case PerturbationFamily::Shift: return "shift";
  }
  return "?";
}

PerturbationFamily family_from_string(std::string_view s) {
  if (s == "block-mask") return PerturbationFamily::BlockMask;
  if (s == "gaussian-noise") return PerturbationFamily::GaussianNoise;
  if (s == "shift") return PerturbationFamily::Shift;
  throw ConfigError("unknown perturbation family '" + std::string(s) + "'");
}

std::vector<PerturbationSpec> default_suite() {
  std::vector<PerturbationSpec> out(3);
  out[0].family = PerturbationFamily::BlockMask;
  out[1].family = PerturbationFamily::GaussianNoise;
  out[2].family = PerturbationFamily::Shift;
  return out;
}

int block_mask_cells(const PerturbationSpec& spec) {
  const int total = spec.grid * spec.grid;
  // ceil with a guard against 0.1 * 16 landing a hair above 1.6 or 2.0.
  const int cells = static_cast<int>(std::ceil(spec.block_ratio * total - 1e-9));
  return std::clamp(cells, 0, total);
}

cv::Mat zero_cells(const cv::Mat& image, int grid, const std::vector<int>& cells) {
  if (grid <= 0) throw Error("grid must be positive");
  cv::Mat out = image.clone();
  for (int cell : cells) {
    if (cell < 0 || cell >= grid * grid) throw Error("cell index out of range");
    const int r = cell / grid, c = cell % grid;
    const int y0 = r * image.rows / grid, y1 = (r + 1) * image.rows / grid;
    const int x0 = c * image.cols / grid, x1 = (c + 1) * image.cols / grid;
    out(cv::Range(y0, y1), cv::Range(x0, x1)).setTo(cv::Scalar::all(0));
  }
  return out;
}

cv::Mat add_gaussian_noise(const cv::Mat& image, double variance, std::mt19937_64& rng) {
  if (variance < 0.0) throw Error("noise variance must be non-negative");
  cv::Mat out = image.clone();
  if (variance == 0.0) return out;
  std::normal_distribution<double> n(0.0, std::sqrt(variance));
  uchar* p = out.data;
  const std::size_t count = out.total() * out.elemSize();
  for (std::size_t i = 0; i < count; ++i) p[i] = cv::saturate_cast<uchar>(p[i] + n(rng));
  return out;
}

cv::Mat shift_image(const cv::Mat& image, int dx, int dy) {
  if (dx == 0 && dy == 0) return image.clone();
  const cv::Mat m = (cv::Mat_<double>(2, 3) << 1, 0, dx, 0, 1, dy);
  cv::Mat out;
  cv::warpAffine(image, out, m, image.size(), cv::INTER_NEAREST, cv::BORDER_REPLICATE);
  return out;
}

cv::Mat perturb(const cv::Mat& image, const PerturbationSpec& spec, std::mt19937_64& rng) {
  if (image.empty()) throw Error("cannot perturb an empty image");
  switch (spec.family) {
    case PerturbationFamily::BlockMask: {
      std::vector<int> all(static_cast<std::size_t>(spec.grid * spec.grid));
      std::iota(all.begin(), all.end(), 0);
      std::vector<int> chosen;
      std::sample(all.begin(), all.end(), std::back_inserter(chosen), block_mask_cells(spec), rng);
      return zero_cells(image, spec.grid, chosen);
    }
    case PerturbationFamily::GaussianNoise: {
      if (spec.noise_var_min < 0 || spec.noise_var_max < spec.noise_var_min) throw Error("bad noise variance range");
      const double var = spec.noise_var_max > spec.noise_var_min
                             ? std::uniform_real_distribution<double>(spec.noise_var_min, spec.noise_var_max)(rng)
                             : spec.noise_var_min;
      return add_gaussian_noise(image, var, rng);
    }
    case PerturbationFamily::Shift: {
      const int sx = static_cast<int>(std::lround(spec.shift_max * image.cols / spec.reference_size));
      const int sy = static_cast<int>(std::lround(spec.shift_max * image.rows / spec.reference_size));
      const int dx = std::uniform_int_distribution<int>(-sx, sx)(rng);
      const int dy = std::uniform_int_distribution<int>(-sy, sy)(rng);
      return shift_image(image, dx, dy);
    }
  }
  throw Error("unknown perturbation family");
}

}  // namespace opr::eval
