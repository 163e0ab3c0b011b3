#include "opr/synth/blend.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <opencv2/imgproc.hpp>

#include "opr/errors.hpp"

namespace opr::synth {
namespace {

// Decorrelates the sub-streams drawn from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  if (hi <= lo) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

void require_rgb(const cv::Mat& image, const char* what) {
  if (image.empty() || image.type() != CV_8UC3) {
    throw Error(std::string(what) + " must be a non-empty 8-bit 3-channel image");
  }
}

double face_scale(const std::vector<cv::Point2d>& hull) {
  double x0 = hull[0].x, x1 = hull[0].x, y0 = hull[0].y, y1 = hull[0].y;
  for (const auto& p : hull) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  return std::hypot(x1 - x0, y1 - y0);
}

cv::Mat fill_polygon(const std::vector<cv::Point2d>& poly, cv::Size size) {
  constexpr int kShift = 4;
  std::vector<cv::Point> pts;
  pts.reserve(poly.size());
  for (const auto& p : poly) {
    pts.emplace_back(cvRound(p.x * (1 << kShift)), cvRound(p.y * (1 << kShift)));
  }
  cv::Mat out = cv::Mat::zeros(size, CV_8UC1);
  cv::fillConvexPoly(out, pts, cv::Scalar(255), cv::LINE_8, kShift);
  return out;
}

int odd_kernel(double radius) { return 2 * std::max(0, static_cast<int>(std::lround(radius))) + 1; }

void validate_mask(const cv::Mat& mask, cv::Size size) {
  if (mask.type() != CV_64FC1 || mask.size() != size) {
    throw Error("blend mask must be single-channel float64 with the base image size");
  }
  double lo = 0, hi = 0;
  cv::minMaxLoc(mask, &lo, &hi);
  if (!(lo >= 0.0 && hi <= 1.0)) throw Error("blend mask values must lie in [0,1]");
}

}  // namespace

void to_json(nlohmann::json& j, const SynthConfig& c) {
  j = nlohmann::json{{"hull_scale_jitter", c.hull_scale_jitter},
                     {"hull_shift_jitter", c.hull_shift_jitter},
                     {"elastic_amplitude", c.elastic_amplitude},
                     {"elastic_smoothness", c.elastic_smoothness},
                     {"erode_fraction", c.erode_fraction},
                     {"feather_min", c.feather_min},
                     {"feather_max", c.feather_max},
                     {"blend_ratio_min", c.blend_ratio_min},
                     {"blend_ratio_max", c.blend_ratio_max},
                     {"brightness_jitter", c.brightness_jitter},
                     {"contrast_jitter", c.contrast_jitter},
                     {"channel_shift", c.channel_shift},
                     {"resize_min", c.resize_min},
                     {"resize_max", c.resize_max},
                     {"warp_shift", c.warp_shift},
                     {"warp_scale", c.warp_scale},
                     {"color_transfer", c.color_transfer}};
}

void from_json(const nlohmann::json& j, SynthConfig& c) {
  SynthConfig d;
  c.hull_scale_jitter = j.value("hull_scale_jitter", d.hull_scale_jitter);
  c.hull_shift_jitter = j.value("hull_shift_jitter", d.hull_shift_jitter);
  c.elastic_amplitude = j.value("elastic_amplitude", d.elastic_amplitude);
  c.elastic_smoothness = j.value("elastic_smoothness", d.elastic_smoothness);
  c.erode_fraction = j.value("erode_fraction", d.erode_fraction);
  c.feather_min = j.value("feather_min", d.feather_min);
  c.feather_max = j.value("feather_max", d.feather_max);
  c.blend_ratio_min = j.value("blend_ratio_min", d.blend_ratio_min);
  c.blend_ratio_max = j.value("blend_ratio_max", d.blend_ratio_max);
  c.brightness_jitter = j.value("brightness_jitter", d.brightness_jitter);
  c.contrast_jitter = j.value("contrast_jitter", d.contrast_jitter);
  c.channel_shift = j.value("channel_shift", d.channel_shift);
  c.resize_min = j.value("resize_min", d.resize_min);
  c.resize_max = j.value("resize_max", d.resize_max);
  c.warp_shift = j.value("warp_shift", d.warp_shift);
  c.warp_scale = j.value("warp_scale", d.warp_scale);
  c.color_transfer = j.value("color_transfer", d.color_transfer);
  if (!(c.blend_ratio_min > 0.0 && c.blend_ratio_min <= c.blend_ratio_max && c.blend_ratio_max <= 1.0)) {
    throw ConfigError("blend ratio range must satisfy 0 < min <= max <= 1");
  }
  if (!(c.resize_min > 0.0 && c.resize_min <= c.resize_max && c.resize_max <= 1.0)) {
    throw ConfigError("resize range must satisfy 0 < min <= max <= 1");
  }
  if (c.feather_min < 0.0 || c.feather_max < c.feather_min) throw ConfigError("bad feather range");
}

nlohmann::json recipe_metadata(const BlendRecipe& r) {
  const auto& d = r.deform;
  nlohmann::json j{{"blend_ratio", r.blend_ratio},
                   {"deform",
                    {{"scale_x", d.scale_x},
                     {"scale_y", d.scale_y},
                     {"shift_x", d.shift_x},
                     {"shift_y", d.shift_y},
                     {"elastic_amplitude", d.elastic_amplitude},
                     {"erode_px", d.erode_px},
                     {"feather_sigma", d.feather_sigma}}},
                   {"color_transfer", {{"applied", r.color_transfer.applied}}}};
  if (r.color_transfer.applied) {
    auto& ct = j["color_transfer"];
    ct["source_mean"] = r.color_transfer.source_mean;
    ct["source_std"] = r.color_transfer.source_std;
    ct["target_mean"] = r.color_transfer.target_mean;
    ct["target_std"] = r.color_transfer.target_std;
  }
  return j;
}

std::vector<cv::Point2d> face_hull(const LandmarkSet& landmarks) {
  if (landmarks.count() < 3) throw DegenerateHullError("face hull needs at least three landmarks");
  std::vector<cv::Point2f> pts;
  pts.reserve(landmarks.count());
  for (const auto& p : landmarks.points) pts.emplace_back(static_cast<float>(p.x), static_cast<float>(p.y));
  std::vector<cv::Point2f> hull;
  cv::convexHull(pts, hull);
  if (hull.size() < 3 || cv::contourArea(hull) < 1.0) {
    throw DegenerateHullError("landmark hull is empty or collinear");
  }
  std::vector<cv::Point2d> out;
  out.reserve(hull.size());
  for (const auto& p : hull) out.emplace_back(p.x, p.y);
  return out;
}

cv::Mat hull_mask(const LandmarkSet& landmarks, cv::Size size) { return fill_polygon(face_hull(landmarks), size); }

BlendRecipe make_blend_recipe(const LandmarkSet& landmarks, cv::Size size, std::uint64_t seed,
                              const SynthConfig& config, const BlendOverrides& overrides) {
  const std::vector<cv::Point2d> hull = face_hull(landmarks);
  cv::Mat support;
  fill_polygon(hull, size).convertTo(support, CV_64F, 1.0 / 255.0);

  BlendRecipe recipe;
  if (overrides.mask) {
    validate_mask(*overrides.mask, size);
    recipe.blend_ratio = overrides.blend_ratio.value_or(1.0);
    recipe.mask = overrides.mask->mul(support) * recipe.blend_ratio;
    return recipe;
  }

  std::mt19937_64 rng(derive_seed(seed, 0));
  const double diag = face_scale(hull);
  MaskDeform& d = recipe.deform;
  d.scale_x = 1.0 + uniform(rng, -config.hull_scale_jitter, config.hull_scale_jitter);
  d.scale_y = 1.0 + uniform(rng, -config.hull_scale_jitter, config.hull_scale_jitter);
  d.shift_x = diag * uniform(rng, -config.hull_shift_jitter, config.hull_shift_jitter);
  d.shift_y = diag * uniform(rng, -config.hull_shift_jitter, config.hull_shift_jitter);
  d.elastic_amplitude = diag * config.elastic_amplitude;
  d.erode_px = diag * config.erode_fraction;
  d.feather_sigma = diag * uniform(rng, config.feather_min, config.feather_max);
  recipe.blend_ratio = overrides.blend_ratio.value_or(uniform(rng, config.blend_ratio_min, config.blend_ratio_max));
  if (!(recipe.blend_ratio > 0.0 && recipe.blend_ratio <= 1.0)) throw Error("blend ratio must lie in (0,1]");

  cv::Point2d c(0, 0);
  for (const auto& p : hull) c += p;
  c *= 1.0 / static_cast<double>(hull.size());
  std::vector<cv::Point2d> moved;
  moved.reserve(hull.size());
  for (const auto& p : hull) {
    moved.emplace_back(c.x + (p.x - c.x) * d.scale_x + d.shift_x, c.y + (p.y - c.y) * d.scale_y + d.shift_y);
  }
  cv::Mat mask;
  fill_polygon(moved, size).convertTo(mask, CV_64F, 1.0 / 255.0);

  if (d.elastic_amplitude > 0.0) {
    cv::Mat dx(size, CV_64F), dy(size, CV_64F);
    std::normal_distribution<double> n01;
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) {
        dx.at<double>(y, x) = n01(rng);
        dy.at<double>(y, x) = n01(rng);
      }
    }
    const double sigma = std::max(0.5, diag * config.elastic_smoothness);
    cv::GaussianBlur(dx, dx, cv::Size(), sigma);
    cv::GaussianBlur(dy, dy, cv::Size(), sigma);
    double peak = 0.0;
    for (const cv::Mat* f : {&dx, &dy}) {
      double lo = 0, hi = 0;
      cv::minMaxLoc(*f, &lo, &hi);
      peak = std::max({peak, std::abs(lo), std::abs(hi)});
    }
    if (peak > 0.0) {
      cv::Mat map_x(size, CV_32F), map_y(size, CV_32F);
      const double k = d.elastic_amplitude / peak;
      for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
          map_x.at<float>(y, x) = static_cast<float>(x + k * dx.at<double>(y, x));
          map_y.at<float>(y, x) = static_cast<float>(y + k * dy.at<double>(y, x));
        }
      }
      cv::remap(mask, mask, map_x, map_y, cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar(0));
    }
  }
  if (d.erode_px >= 0.5) {
    const int k = odd_kernel(d.erode_px);
    cv::erode(mask, mask, cv::getStructuringElement(cv::MORPH_ELLIPSE, cv::Size(k, k)));
  }
  if (d.feather_sigma > 0.0) cv::GaussianBlur(mask, mask, cv::Size(), d.feather_sigma);

  // Keep the support inside the face hull, then apply the ratio.
  mask = mask.mul(support);
  cv::threshold(mask, mask, 1.0, 1.0, cv::THRESH_TRUNC);
  cv::threshold(mask, mask, 0.0, 0.0, cv::THRESH_TOZERO);
  recipe.mask = mask * recipe.blend_ratio;
  return recipe;
}

cv::Mat composite(const cv::Mat& base, const cv::Mat& overlay, const cv::Mat& mask) {
  require_rgb(base, "base image");
  require_rgb(overlay, "overlay image");
  if (overlay.size() != base.size()) throw Error("overlay and base image sizes differ");
  validate_mask(mask, base.size());
  cv::Mat out = base.clone();
  for (int y = 0; y < base.rows; ++y) {
    const auto* b = base.ptr<cv::Vec3b>(y);
    const auto* o = overlay.ptr<cv::Vec3b>(y);
    const auto* m = mask.ptr<double>(y);
    auto* r = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < base.cols; ++x) {
      if (m[x] == 0.0) continue;
      for (int ch = 0; ch < 3; ++ch) {
        r[x][ch] = cv::saturate_cast<uchar>(b[x][ch] + m[x] * (static_cast<double>(o[x][ch]) - b[x][ch]));
      }
    }
  }
  return out;
}

ColorTransfer fit_color_transfer(const cv::Mat& source, const cv::Mat& target, const cv::Mat& support) {
  require_rgb(source, "color-transfer source");
  require_rgb(target, "color-transfer target");
  if (cv::countNonZero(support) == 0) throw Error("color transfer support is empty");
  cv::Scalar sm, ss, tm, ts;
  cv::meanStdDev(source, sm, ss, support);
  cv::meanStdDev(target, tm, ts, support);
  ColorTransfer t;
  t.applied = true;
  for (int c = 0; c < 3; ++c) {
    t.source_mean[c] = sm[c];
    t.source_std[c] = ss[c];
    t.target_mean[c] = tm[c];
    t.target_std[c] = ts[c];
  }
  return t;
}

cv::Mat apply_color_transfer(const cv::Mat& image, const ColorTransfer& t) {
  require_rgb(image, "color-transfer input");
  if (!t.applied) return image.clone();
  std::array<double, 3> gain{};
  for (int c = 0; c < 3; ++c) gain[c] = t.source_std[c] > 1e-6 ? t.target_std[c] / t.source_std[c] : 1.0;
  cv::Mat out(image.size(), image.type());
  for (int y = 0; y < image.rows; ++y) {
    const auto* in = image.ptr<cv::Vec3b>(y);
    auto* o = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        o[x][c] = cv::saturate_cast<uchar>((in[x][c] - t.source_mean[c]) * gain[c] + t.target_mean[c]);
      }
    }
  }
  return out;
}

BlendfakeSample generate_sbi(const cv::Mat& base_image, const LandmarkSet& landmarks, std::uint64_t seed,
                             const SynthConfig& config, const BlendOverrides& overrides) {
  require_rgb(base_image, "SBI base image");
  validate_landmarks(landmarks, base_image.size());
  BlendfakeSample sample;
  sample.kind = BlendKind::Sbi;
  sample.recipe = make_blend_recipe(landmarks, base_image.size(), seed, config, overrides);

  // The source variant; the target variant is the base image itself so the
  // output only departs from the base inside the mask.
  cv::Mat variant = base_image.clone();
  if (!overrides.identity_transform) {
    std::mt19937_64 rng(derive_seed(seed, 1));
    const double alpha = 1.0 + uniform(rng, -config.contrast_jitter, config.contrast_jitter);
    const double beta = uniform(rng, -config.brightness_jitter, config.brightness_jitter);
    std::array<double, 3> shift{};
    for (double& s : shift) s = uniform(rng, -config.channel_shift, config.channel_shift);
    for (int y = 0; y < variant.rows; ++y) {
      auto* p = variant.ptr<cv::Vec3b>(y);
      for (int x = 0; x < variant.cols; ++x) {
        for (int c = 0; c < 3; ++c) p[x][c] = cv::saturate_cast<uchar>(alpha * p[x][c] + beta + shift[c]);
      }
    }
    const double factor = uniform(rng, config.resize_min, config.resize_max);
    if (factor < 1.0) {
      const cv::Size small(std::max(1, static_cast<int>(std::lround(variant.cols * factor))),
                           std::max(1, static_cast<int>(std::lround(variant.rows * factor))));
      cv::Mat tmp;
      cv::resize(variant, tmp, small, 0, 0, cv::INTER_AREA);
      cv::resize(tmp, variant, base_image.size(), 0, 0, cv::INTER_LINEAR);
    }
    const double s = 1.0 + uniform(rng, -config.warp_scale, config.warp_scale);
    const double tx = variant.cols * uniform(rng, -config.warp_shift, config.warp_shift);
    const double ty = variant.rows * uniform(rng, -config.warp_shift, config.warp_shift);
    const cv::Point2d c = landmarks.centroid();
    cv::Mat warp = (cv::Mat_<double>(2, 3) << s, 0, (1 - s) * c.x + tx, 0, s, (1 - s) * c.y + ty);
    cv::warpAffine(variant, variant, warp, variant.size(), cv::INTER_LINEAR, cv::BORDER_REFLECT);
  }
  sample.image = composite(base_image, variant, sample.recipe.mask);
  return sample;
}

cv::Mat fit_affine(const LandmarkSet& from, const LandmarkSet& to) {
  if (from.count() != to.count() || from.count() < 3) {
    throw Error("affine fit needs two landmark sets of equal count >= 3");
  }
  const int n = static_cast<int>(from.count());
  cv::Mat a(n, 3, CV_64F), b(n, 2, CV_64F);
  for (int i = 0; i < n; ++i) {
    a.at<double>(i, 0) = from.points[i].x;
    a.at<double>(i, 1) = from.points[i].y;
    a.at<double>(i, 2) = 1.0;
    b.at<double>(i, 0) = to.points[i].x;
    b.at<double>(i, 1) = to.points[i].y;
  }
  cv::Mat x;
  if (!cv::solve(a, b, x, cv::DECOMP_SVD)) throw DegenerateHullError("landmarks do not determine an affine map");
  return x.t();  // 2x3
}

BlendfakeSample generate_cbi(const cv::Mat& base_image, const LandmarkSet& base_landmarks,
                             const cv::Mat& source_image, const LandmarkSet& source_landmarks, std::uint64_t seed,
                             const SynthConfig& config, const BlendOverrides& overrides) {
  require_rgb(base_image, "CBI base image");
  require_rgb(source_image, "CBI source image");
  validate_landmarks(base_landmarks, base_image.size());
  validate_landmarks(source_landmarks, source_image.size());
  if (base_landmarks.count() != source_landmarks.count()) throw Error("CBI landmark counts differ");

  BlendfakeSample sample;
  sample.kind = BlendKind::Cbi;
  sample.recipe = make_blend_recipe(base_landmarks, base_image.size(), seed, config, overrides);

  cv::Mat aligned;
  const cv::Mat identity = (cv::Mat_<double>(2, 3) << 1, 0, 0, 0, 1, 0);
  const cv::Mat warp = overrides.identity_transform ? identity : fit_affine(source_landmarks, base_landmarks);
  if (cv::norm(warp, identity, cv::NORM_INF) <= 1e-9 && source_image.size() == base_image.size()) {
    aligned = source_image.clone();
  } else {
    // Every base face pixel must be sampled from inside the source image.
    cv::Mat inverse;
    cv::invertAffineTransform(warp, inverse);
    for (const auto& p : face_hull(base_landmarks)) {
      const double sx = inverse.at<double>(0, 0) * p.x + inverse.at<double>(0, 1) * p.y + inverse.at<double>(0, 2);
      const double sy = inverse.at<double>(1, 0) * p.x + inverse.at<double>(1, 1) * p.y + inverse.at<double>(1, 2);
      if (!(sx >= -0.5 && sy >= -0.5 && sx <= source_image.cols - 0.5 && sy <= source_image.rows - 0.5)) {
        throw WarpOutOfBoundsError("CBI warp maps the base face outside the source image");
      }
    }
    cv::warpAffine(source_image, aligned, warp, base_image.size(), cv::INTER_LINEAR, cv::BORDER_REPLICATE);
  }

  if (overrides.color_transfer.value_or(config.color_transfer)) {
    const cv::Mat support = hull_mask(base_landmarks, base_image.size());
    sample.recipe.color_transfer = fit_color_transfer(aligned, base_image, support);
    aligned = apply_color_transfer(aligned, sample.recipe.color_transfer);
  }
  sample.image = composite(base_image, aligned, sample.recipe.mask);
  return sample;
}

}  // namespace opr::synth
