#include "opr/synth/quad.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <opencv2/imgcodecs.hpp>

#include "opr/errors.hpp"

namespace opr::synth {
namespace {

constexpr std::string_view kQuadFormat = "opr-quads";
constexpr int kQuadVersion = 1;
constexpr std::array<const char*, 4> kImageKeys = {"real", "sbi", "cbi", "deepfake"};

cv::Mat read_rgb(const std::filesystem::path& p) {
  cv::Mat m = cv::imread(p.string(), cv::IMREAD_COLOR);
  if (m.empty()) throw Error("cannot read image " + p.string());
  return m;
}

}  // namespace

std::string_view to_string(CbiFailurePolicy p) { return p == CbiFailurePolicy::Drop ? "drop" : "substitute-sbi"; }

CbiFailurePolicy policy_from_string(std::string_view s) {
  if (s == "drop") return CbiFailurePolicy::Drop;
  if (s == "substitute-sbi") return CbiFailurePolicy::SubstituteSbi;
  throw ConfigError("unknown CBI failure policy '" + std::string(s) + "'");
}

LoadedFrame load_frame(const data::FrameRecord& r) {
  LoadedFrame f;
  f.real.frame_id = r.frame_id;
  f.real.video_id = r.video_id;
  f.real.identity_id = r.identity_id;
  f.real.image = read_rgb(r.real_path);
  f.real.landmarks = load_landmarks(r.landmark_path);
  f.deepfake = read_rgb(r.deepfake_path);
  if (f.deepfake.size() != f.real.image.size()) {
    throw Error("frame " + r.frame_id + ": real and deepfake images differ in size");
  }
  return f;
}

std::uint64_t frame_seed(std::uint64_t seed, const std::string& frame_id) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : frame_id) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = h ^ (seed * 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

QuadBuilder::QuadBuilder(std::vector<RealFrame> donor_pool, QuadBuilderConfig config)
    : pool_(std::move(donor_pool)), config_(std::move(config)) {
  if (config_.pool_size < 0) throw ConfigError("pool_size must be non-negative");
  entries_.reserve(pool_.size());
  for (const auto& p : pool_) entries_.push_back({p.frame_id, p.identity_id, p.landmarks});
}

std::optional<AlignedQuad> QuadBuilder::build_aligned_quad(const RealFrame& frame, const cv::Mat& deepfake_image,
                                                           std::uint64_t seed) {
  if (deepfake_image.size() != frame.image.size() || deepfake_image.type() != frame.image.type()) {
    throw Error("frame " + frame.frame_id + ": deepfake image does not match the real frame");
  }
  std::mt19937_64 rng(seed);
  const std::uint64_t sbi_seed = rng(), cbi_seed = rng(), retry_seed = rng();

  AlignedQuad quad;
  quad.frame_ids.fill(frame.frame_id);
  quad.video_id = frame.video_id;
  quad.identity_id = frame.identity_id;
  for (auto k : labels::kAllAnchors) {
    quad.labels[labels::anchor_index(k)] = labels::organization_variant(k, config_.organization);
  }

  BlendfakeSample sbi;
  try {
    sbi = generate_sbi(frame.image, frame.landmarks, sbi_seed, config_.synth);
  } catch (const DegenerateHullError&) {
    ++dropped_;
    return std::nullopt;
  }
  sbi.source_frame_id = sbi.donor_frame_id = frame.frame_id;

  std::optional<BlendfakeSample> cbi;
  std::string failure;
  try {
    std::vector<const PoolEntry*> candidates;
    for (const auto& e : entries_) {
      if (e.identity_id != frame.identity_id) candidates.push_back(&e);
    }
    if (config_.pool_size > 0 && candidates.size() > static_cast<std::size_t>(config_.pool_size)) {
      std::vector<const PoolEntry*> picked;
      std::sample(candidates.begin(), candidates.end(), std::back_inserter(picked),
                  static_cast<std::size_t>(config_.pool_size), rng);
      candidates.swap(picked);
    }
    std::vector<PoolEntry> subset;
    subset.reserve(candidates.size());
    for (const auto* c : candidates) subset.push_back(*c);
    const LandmarkMatch match = find_landmark_match(frame.landmarks, subset, frame.identity_id);
    const auto donor = std::find_if(pool_.begin(), pool_.end(),
                                    [&](const RealFrame& p) { return p.frame_id == match.frame_id; });
    cbi = generate_cbi(frame.image, frame.landmarks, donor->image, donor->landmarks, cbi_seed, config_.synth);
    cbi->source_frame_id = frame.frame_id;
    cbi->donor_frame_id = donor->frame_id;
    quad.metadata["cbi_match_distance"] = match.distance;
  } catch (const EmptyPoolError& e) {
    failure = e.what();
  } catch (const WarpOutOfBoundsError& e) {
    failure = e.what();
  } catch (const DegenerateHullError& e) {
    failure = e.what();
  }

  if (!cbi) {
    if (config_.policy == CbiFailurePolicy::Drop) {
      ++dropped_;
      return std::nullopt;
    }
    BlendfakeSample second = generate_sbi(frame.image, frame.landmarks, retry_seed, config_.synth);
    second.source_frame_id = second.donor_frame_id = frame.frame_id;
    cbi = std::move(second);
    ++substituted_;
    quad.metadata["cbi_substituted_by_sbi"] = true;
    quad.metadata["cbi_failure"] = failure;
  }

  quad.images[0] = frame.image.clone();
  quad.images[1] = sbi.image;
  quad.images[2] = cbi->image;
  quad.images[3] = deepfake_image.clone();
  quad.metadata["organization"] = std::string(labels::to_string(config_.organization));
  quad.metadata["sbi"] = recipe_metadata(sbi.recipe);
  quad.metadata["cbi"] = recipe_metadata(cbi->recipe);
  quad.metadata["cbi_donor_frame_id"] = cbi->donor_frame_id;
  quad.metadata["seed"] = seed;
  return quad;
}

std::vector<AlignedQuad> build_quads(const std::vector<data::FrameRecord>& records, data::Split split,
                                     std::uint64_t seed, const QuadBuilderConfig& config, int* dropped,
                                     int* substituted) {
  std::vector<RealFrame> donors;
  std::vector<LoadedFrame> wanted;
  for (const auto& r : records) {
    if (r.split != data::Split::Train && r.split != split) continue;
    LoadedFrame f = load_frame(r);
    if (r.split == data::Split::Train) donors.push_back(f.real);
    if (r.split == split) wanted.push_back(std::move(f));
  }
  QuadBuilder builder(std::move(donors), config);
  std::vector<AlignedQuad> quads;
  quads.reserve(wanted.size());
  for (const auto& f : wanted) {
    if (auto q = builder.build_aligned_quad(f.real, f.deepfake, frame_seed(seed, f.real.frame_id))) {
      quads.push_back(std::move(*q));
    }
  }
  if (dropped) *dropped = builder.dropped();
  if (substituted) *substituted = builder.substituted();
  return quads;
}

std::filesystem::path write_quads(const std::vector<AlignedQuad>& quads, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "images");
  nlohmann::json list = nlohmann::json::array();
  for (const auto& q : quads) {
    nlohmann::json images;
    for (int k = 0; k < 4; ++k) {
      const std::string rel = "images/" + q.frame_id() + "_" + kImageKeys[k] + ".png";
      if (!cv::imwrite((out_dir / rel).string(), q.images[k])) throw Error("cannot write " + rel);
      images[kImageKeys[k]] = rel;
    }
    nlohmann::json lab = nlohmann::json::array();
    for (const auto& l : q.labels) lab.push_back({l.a0, l.a1, l.a2});
    list.push_back({{"frame_id", q.frame_id()},
                    {"video_id", q.video_id},
                    {"identity_id", q.identity_id},
                    {"images", images},
                    {"labels", lab},
                    {"metadata", q.metadata}});
  }
  const fs::path path = out_dir / "quads.json";
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << nlohmann::json{{"format", kQuadFormat}, {"version", kQuadVersion}, {"quads", list}}.dump(1) << '\n';
  return path;
}

std::vector<AlignedQuad> read_quads(const std::filesystem::path& quads_json) {
  std::ifstream in(quads_json);
  if (!in) throw Error("cannot open " + quads_json.string());
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != kQuadFormat || j.value("version", -1) != kQuadVersion) {
    throw Error(quads_json.string() + " is not a version " + std::to_string(kQuadVersion) + " quad manifest");
  }
  const auto base = quads_json.parent_path();
  std::vector<AlignedQuad> quads;
  for (const auto& e : j.at("quads")) {
    AlignedQuad q;
    q.frame_ids.fill(e.at("frame_id").get<std::string>());
    q.video_id = e.at("video_id").get<std::string>();
    q.identity_id = e.at("identity_id").get<std::string>();
    for (int k = 0; k < 4; ++k) {
      q.images[k] = read_rgb(base / e.at("images").at(kImageKeys[k]).get<std::string>());
      const auto& l = e.at("labels").at(k);
      q.labels[k] = {l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()};
    }
    q.metadata = e.value("metadata", nlohmann::json::object());
    quads.push_back(std::move(q));
  }
  return quads;
}

}  // namespace opr::synth
