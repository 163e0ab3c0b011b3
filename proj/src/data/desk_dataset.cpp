#include "opr/data/desk_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "opr/data/manifest.hpp"
#include "opr/errors.hpp"

namespace opr::data {
namespace {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Face-frame coordinates (unit radius ellipse) of pixel centre (x, y).
cv::Point2d to_face(const FaceGeometry& g, double x, double y) {
  const double dx = x - g.cx, dy = y - g.cy;
  const double c = std::cos(g.angle), s = std::sin(g.angle);
  return {(c * dx + s * dy) / g.rx, (-s * dx + c * dy) / g.ry};
}

// Anti-aliased coverage of the ellipse (centre, radii) in face coordinates.
double coverage(const cv::Point2d& f, cv::Point2d centre, cv::Point2d radii, double px_scale) {
  const double u = (f.x - centre.x) / radii.x, v = (f.y - centre.y) / radii.y;
  const double r = std::sqrt(u * u + v * v);
  return std::clamp((1.0 - r) * px_scale * std::min(radii.x, radii.y) + 0.5, 0.0, 1.0);
}

cv::Vec3d texture(const IdentityLook& look, const cv::Point2d& f) {
  double t = 0.0;
  for (const auto& w : look.waves) t += std::sin(2.0 * std::numbers::pi * (w[0] * f.x + w[1] * f.y) + w[2]);
  const double a = look.texture_amplitude * t / 3.0;
  return look.skin + cv::Vec3d(a, 0.8 * a, 0.6 * a);
}

// Noise-free face colour at one pixel, as doubles.
cv::Vec3d shade(const IdentityLook& look, const FaceGeometry& g, double x, double y, double px) {
  const cv::Point2d f = to_face(g, x, y);
  cv::Vec3d c = look.background * (0.85 + 0.15 * y / std::max(1.0, 2 * g.cy));
  const double face = coverage(f, {0, 0}, {1, 1}, px);
  if (face <= 0.0) return c;
  cv::Vec3d skin = texture(look, f);
  for (double side : {-1.0, 1.0}) {
    const double e = coverage(f, {side * 0.38, -0.18}, {0.16, 0.08}, px);
    skin = skin * (1 - e) + look.eyes * e;
  }
  const double m = coverage(f, {0.0, 0.5}, {0.34, 0.12}, px);
  skin = skin * (1 - m) + look.mouth * m;
  return c * (1 - face) + skin * face;
}

double pattern(ArtifactKind kind, int x, int y, std::mt19937_64& rng) {
  switch (kind) {
    case ArtifactKind::Checkerboard:
      return ((x + y) % 2 == 0) ? 1.0 : -1.0;
    case ArtifactKind::Stripes:
      return (x % 2 == 0) ? 1.0 : -1.0;
    case ArtifactKind::Speckle:
      return std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  }
  return 0.0;
}

FaceGeometry frame_geometry(const FaceGeometry& base, int size, std::mt19937_64& rng) {
  FaceGeometry g = base;
  g.cx += size * uniform(rng, -0.03, 0.03);
  g.cy += size * uniform(rng, -0.03, 0.03);
  g.rx *= uniform(rng, 0.97, 1.03);
  g.ry *= uniform(rng, 0.97, 1.03);
  g.angle += uniform(rng, -0.06, 0.06);
  return g;
}

}  // namespace

void to_json(nlohmann::json& j, const CueStrengths& c) {
  j = {{"boundary", c.boundary}, {"identity", c.identity}, {"artifact", c.artifact}};
}

void from_json(const nlohmann::json& j, CueStrengths& c) {
  CueStrengths d;
  c.boundary = j.value("boundary", d.boundary);
  c.identity = j.value("identity", d.identity);
  c.artifact = j.value("artifact", d.artifact);
  if (c.boundary < 0 || c.identity < 0 || c.identity > 1 || c.artifact < 0) {
    throw ConfigError("cue strengths must be non-negative and identity <= 1");
  }
}

std::string_view to_string(ArtifactKind k) {
  switch (k) {
    case ArtifactKind::Checkerboard: return "checkerboard";
    case ArtifactKind::Stripes: return "stripes";
    case ArtifactKind::Speckle: return "speckle";
  }
  return "?";
}

ArtifactKind artifact_from_string(std::string_view s) {
  if (s == "checkerboard") return ArtifactKind::Checkerboard;
  if (s == "stripes") return ArtifactKind::Stripes;
  if (s == "speckle") return ArtifactKind::Speckle;
  throw ConfigError("unknown artifact kind '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const DeskSpec& s) {
  j = {{"image_size", s.image_size},
       {"train_videos", s.train_videos},
       {"test_videos", s.test_videos},
       {"frames_per_video", s.frames_per_video},
       {"test_frames_per_video", s.test_frames_per_video},
       {"seed", s.seed},
       {"train_cues", s.train_cues},
       {"test_cues", s.test_cues},
       {"train_artifact", std::string(to_string(s.train_artifact))},
       {"test_artifact", std::string(to_string(s.test_artifact))},
       {"dataset", s.dataset}};
}

void from_json(const nlohmann::json& j, DeskSpec& s) {
  DeskSpec d;
  s.image_size = j.value("image_size", d.image_size);
  s.train_videos = j.value("train_videos", d.train_videos);
  s.test_videos = j.value("test_videos", d.test_videos);
  s.frames_per_video = j.value("frames_per_video", d.frames_per_video);
  s.test_frames_per_video = j.value("test_frames_per_video", d.test_frames_per_video);
  s.seed = j.value("seed", d.seed);
  s.train_cues = j.value("train_cues", d.train_cues);
  s.test_cues = j.value("test_cues", d.test_cues);
  s.train_artifact = artifact_from_string(j.value("train_artifact", std::string(to_string(d.train_artifact))));
  s.test_artifact = artifact_from_string(j.value("test_artifact", std::string(to_string(d.test_artifact))));
  s.dataset = j.value("dataset", d.dataset);
  if (s.image_size < 16) throw ConfigError("desk image_size must be at least 16");
  if (s.train_videos < 0 || s.test_videos < 0 || s.frames_per_video <= 0 || s.test_frames_per_video <= 0) {
    throw ConfigError("desk video and frame counts must be positive");
  }
}

synth::LandmarkSet template_landmarks(const FaceGeometry& g) {
  std::vector<cv::Point2d> unit;
  unit.reserve(kTemplateLandmarks);
  const double pi = std::numbers::pi;
  for (int k = 0; k < 24; ++k) unit.emplace_back(std::cos(2 * pi * k / 24), std::sin(2 * pi * k / 24));
  for (double side : {-1.0, 1.0}) {
    for (int k = 0; k < 8; ++k) {
      unit.emplace_back(side * 0.38 + 0.16 * std::cos(2 * pi * k / 8), -0.18 + 0.08 * std::sin(2 * pi * k / 8));
    }
  }
  for (double side : {-1.0, 1.0}) {
    for (int k = 0; k < 6; ++k) {
      const double t = k / 5.0;
      unit.emplace_back(side * (0.15 + 0.45 * t), -0.42 - 0.06 * std::sin(pi * t));
    }
  }
  for (int k = 0; k < 4; ++k) unit.emplace_back(0.0, -0.15 + 0.1 * k);
  for (int k = 0; k < 5; ++k) unit.emplace_back(-0.16 + 0.08 * k, 0.22);
  for (int k = 0; k < 12; ++k) unit.emplace_back(0.34 * std::cos(2 * pi * k / 12), 0.5 + 0.12 * std::sin(2 * pi * k / 12));
  for (int k = 0; k < 8; ++k) unit.emplace_back(0.22 * std::cos(2 * pi * k / 8), 0.5 + 0.05 * std::sin(2 * pi * k / 8));

  synth::LandmarkSet out;
  const double c = std::cos(g.angle), s = std::sin(g.angle);
  for (const auto& u : unit) {
    const double x = u.x * g.rx, y = u.y * g.ry;
    out.points.emplace_back(g.cx + c * x - s * y, g.cy + s * x + c * y);
  }
  return out;
}

IdentityLook random_look(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityLook l;
  const double r = uniform(rng, 150, 230);
  l.skin = {r * uniform(rng, 0.45, 0.75), r * uniform(rng, 0.6, 0.85), r};  // BGR
  l.background = {uniform(rng, 30, 120), uniform(rng, 30, 120), uniform(rng, 30, 120)};
  l.eyes = {uniform(rng, 20, 60), uniform(rng, 20, 60), uniform(rng, 20, 60)};
  l.mouth = {uniform(rng, 40, 90), uniform(rng, 40, 90), uniform(rng, 120, 200)};
  for (auto& w : l.waves) w = {uniform(rng, -2.5, 2.5), uniform(rng, -2.5, 2.5), uniform(rng, 0, 2 * std::numbers::pi)};
  l.texture_amplitude = uniform(rng, 6, 14);
  return l;
}

cv::Mat render_face(const IdentityLook& look, const FaceGeometry& g, cv::Size size, std::uint64_t noise_seed) {
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, 1.5);
  cv::Mat out(size, CV_8UC3);
  for (int y = 0; y < size.height; ++y) {
    auto* row = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < size.width; ++x) {
      const cv::Vec3d c = shade(look, g, x + 0.5, y + 0.5, 1.0);
      for (int ch = 0; ch < 3; ++ch) row[x][ch] = cv::saturate_cast<uchar>(c[ch] + noise(rng));
    }
  }
  return out;
}

cv::Mat forge_face(const cv::Mat& real, const IdentityLook& donor, const FaceGeometry& g, const CueStrengths& cues,
                   ArtifactKind artifact, std::uint64_t seed) {
  if (real.empty() || real.type() != CV_8UC3) throw Error("forge_face expects an 8-bit 3-channel image");
  std::mt19937_64 rng(seed);
  cv::Vec3d direction(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
  direction /= std::max(1e-9, cv::norm(direction));
  const cv::Vec3d offset = direction * cues.boundary;

  cv::Mat out = real.clone();
  for (int y = 0; y < real.rows; ++y) {
    const auto* in = real.ptr<cv::Vec3b>(y);
    auto* o = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < real.cols; ++x) {
      const cv::Point2d f = to_face(g, x + 0.5, y + 0.5);
      const double m = coverage(f, {0.0, 0.1}, {0.72, 0.72}, 1.0);
      // Drawn unconditionally so the stream does not depend on the mask.
      const double p = pattern(artifact, x, y, rng);
      if (m <= 0.0) continue;
      const cv::Vec3d base(in[x][0], in[x][1], in[x][2]);
      cv::Vec3d overlay = base;
      if (cues.identity > 0.0) overlay = base * (1.0 - cues.identity) + shade(donor, g, x + 0.5, y + 0.5, 1.0) * cues.identity;
      overlay += offset + cv::Vec3d::all(cues.artifact * p);
      for (int ch = 0; ch < 3; ++ch) o[x][ch] = cv::saturate_cast<uchar>(base[ch] + m * (overlay[ch] - base[ch]));
    }
  }
  return out;
}

double laplacian_energy_score(const cv::Mat& image) {
  cv::Mat gray, lap;
  cv::cvtColor(image, gray, cv::COLOR_BGR2GRAY);
  cv::Laplacian(gray, lap, CV_64F);
  const int w = image.cols, h = image.rows;
  const cv::Rect inner(w / 4, h / 4, w / 2, h / 2);
  cv::Mat sq;
  cv::multiply(lap(inner), lap(inner), sq);
  return cv::mean(sq)[0];
}

std::filesystem::path synth_desk_dataset(const DeskSpec& spec, const std::filesystem::path& out_dir) {
  if (spec.image_size < 16) throw ConfigError("desk image_size must be at least 16");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "frames");
  fs::create_directories(out_dir / "landmarks");
  const int n = spec.image_size;
  const cv::Size size(n, n);

  std::vector<FrameRecord> records;
  const int total = spec.train_videos + spec.test_videos;
  char buf[64];
  for (int v = 0; v < total; ++v) {
    const bool train = v < spec.train_videos;
    const std::uint64_t vseed = mix_seed(spec.seed, static_cast<std::uint64_t>(v));
    std::mt19937_64 rng(vseed);
    const IdentityLook look = random_look(mix_seed(vseed, 1));
    const IdentityLook donor = random_look(mix_seed(vseed, 2));
    FaceGeometry base;
    base.cx = n / 2.0;
    base.cy = n / 2.0;
    base.rx = n * uniform(rng, 0.28, 0.32);
    base.ry = n * uniform(rng, 0.36, 0.40);
    base.angle = uniform(rng, -0.1, 0.1);

    std::snprintf(buf, sizeof buf, "v%04d", v);
    const std::string video_id = buf;
    std::snprintf(buf, sizeof buf, "id%04d", v);
    const std::string identity_id = buf;
    const int frames = train ? spec.frames_per_video : spec.test_frames_per_video;
    for (int f = 0; f < frames; ++f) {
      const FaceGeometry g = frame_geometry(base, n, rng);
      const std::uint64_t fseed = mix_seed(vseed, 100 + static_cast<std::uint64_t>(f));
      const cv::Mat real = render_face(look, g, size, fseed);
      const cv::Mat fake = forge_face(real, donor, g, train ? spec.train_cues : spec.test_cues,
                                      train ? spec.train_artifact : spec.test_artifact, mix_seed(fseed, 7));
      std::snprintf(buf, sizeof buf, "%s_f%03d", video_id.c_str(), f);
      FrameRecord r;
      r.frame_id = buf;
      r.video_id = video_id;
      r.identity_id = identity_id;
      r.real_path = out_dir / "frames" / (r.frame_id + "_real.png");
      r.deepfake_path = out_dir / "frames" / (r.frame_id + "_fake.png");
      r.landmark_path = out_dir / "landmarks" / (r.frame_id + ".txt");
      r.split = train ? Split::Train : Split::Test;
      r.dataset = train ? spec.dataset : spec.dataset + "-cueshift";
      if (!cv::imwrite(r.real_path.string(), real) || !cv::imwrite(r.deepfake_path.string(), fake)) {
        throw Error("failed to write desk frame " + r.frame_id);
      }
      synth::save_landmarks(template_landmarks(g), r.landmark_path);
      records.push_back(std::move(r));
    }
  }
  const fs::path manifest = out_dir / "manifest.json";
  save_manifest(records, manifest);
  return manifest;
}

}  // namespace opr::data
