#include "opr/data/manifest.hpp"

#include <fstream>
#include <map>
#include <set>

#include "opr/errors.hpp"

namespace opr {

MissingFilesError::MissingFilesError(std::vector<std::string> missing)
    : ManifestError([&] {
        std::string msg = std::to_string(missing.size()) + " file(s) referenced by the manifest are missing:";
        for (const auto& m : missing) msg += "\n  " + m;
        return msg;
      }()),
      missing_(std::move(missing)) {}

namespace data {

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "test") return Split::Test;
  throw ManifestError("unknown split tag '" + std::string(s) + "'");
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string relative_to(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.is_relative()) return p.generic_string();
  std::error_code ec;
  auto rel = std::filesystem::relative(p, base, ec);
  return ec || rel.empty() ? p.generic_string() : rel.generic_string();
}

}  // namespace

void validate_records(const std::vector<FrameRecord>& records, bool require_files) {
  std::set<std::string> seen;
  std::map<std::string, std::string> video_identity;
  std::map<std::string, Split> video_split;
  std::vector<std::string> missing;
  for (const auto& r : records) {
    if (r.frame_id.empty() || r.video_id.empty() || r.identity_id.empty()) {
      throw ManifestError("frame record with empty frame_id, video_id or identity_id");
    }
    if (!seen.insert(r.frame_id).second) throw DuplicateFrameError(r.frame_id);

    auto [it, fresh] = video_identity.emplace(r.video_id, r.identity_id);
    if (!fresh && it->second != r.identity_id) {
      throw ManifestError("video '" + r.video_id + "' mixes identities '" + it->second + "' and '" + r.identity_id +
                          "'");
    }
    auto [st, first] = video_split.emplace(r.video_id, r.split);
    if (!first && st->second != r.split) {
      throw SplitLeakError("video '" + r.video_id + "' appears in both train and test splits");
    }
    if (require_files) {
      for (const auto* p : {&r.real_path, &r.deepfake_path, &r.landmark_path}) {
        if (!std::filesystem::is_regular_file(*p)) missing.push_back(p->string());
      }
    }
  }
  if (!missing.empty()) throw MissingFilesError(std::move(missing));
}

std::vector<FrameRecord> load_manifest(const std::filesystem::path& path, ManifestCheck check) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kManifestFormat) {
    throw ManifestError("manifest " + path.string() + " lacks format tag '" + std::string(kManifestFormat) + "'");
  }
  if (j.value("version", -1) != kManifestVersion) {
    throw ManifestError("manifest version " + j.value("version", nlohmann::json(nullptr)).dump() +
                        " is not supported (expected " + std::to_string(kManifestVersion) + ")");
  }
  const auto base = path.parent_path();
  std::vector<FrameRecord> records;
  try {
    for (const auto& f : j.at("frames")) {
      FrameRecord r;
      r.frame_id = f.at("frame_id").get<std::string>();
      r.video_id = f.at("video_id").get<std::string>();
      r.identity_id = f.at("identity_id").get<std::string>();
      r.real_path = resolve(base, f.at("real_path").get<std::string>());
      r.deepfake_path = resolve(base, f.at("deepfake_path").get<std::string>());
      r.landmark_path = resolve(base, f.at("landmark_path").get<std::string>());
      r.split = split_from_string(f.at("split").get<std::string>());
      r.dataset = f.value("dataset", std::string("default"));
      records.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError("malformed frame record in " + path.string() + ": " + e.what());
  }
  validate_records(records, check.require_files);
  return records;
}

void save_manifest(const std::vector<FrameRecord>& records, const std::filesystem::path& path) {
  const auto base = path.parent_path();
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& r : records) {
    frames.push_back({{"frame_id", r.frame_id},
                      {"video_id", r.video_id},
                      {"identity_id", r.identity_id},
                      {"real_path", relative_to(r.real_path, base)},
                      {"deepfake_path", relative_to(r.deepfake_path, base)},
                      {"landmark_path", relative_to(r.landmark_path, base)},
                      {"split", std::string(to_string(r.split))},
                      {"dataset", r.dataset}});
  }
  nlohmann::json j{{"format", kManifestFormat}, {"version", kManifestVersion}, {"frames", frames}};
  std::ofstream out(path);
  if (!out) throw ManifestError("cannot write manifest " + path.string());
  out << j.dump(1) << '\n';
}

std::vector<FrameRecord> filter_split(const std::vector<FrameRecord>& records, Split split) {
  std::vector<FrameRecord> out;
  for (const auto& r : records) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

}  // namespace data
}  // namespace opr
