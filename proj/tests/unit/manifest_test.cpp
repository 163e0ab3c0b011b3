#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "opr/data/manifest.hpp"
#include "opr/errors.hpp"
#include "test_data.hpp"

namespace {

using namespace opr::data;
namespace fs = std::filesystem;

std::vector<FrameRecord> records_in(const fs::path& dir, int videos, int frames) {
  std::vector<FrameRecord> out;
  for (int v = 0; v < videos; ++v) {
    for (int f = 0; f < frames; ++f) {
      FrameRecord r;
      r.frame_id = "v" + std::to_string(v) + "_f" + std::to_string(f);
      r.video_id = "v" + std::to_string(v);
      r.identity_id = "id" + std::to_string(v);
      r.real_path = dir / (r.frame_id + "_real.png");
      r.deepfake_path = dir / (r.frame_id + "_fake.png");
      r.landmark_path = dir / (r.frame_id + ".txt");
      r.split = v == 0 ? Split::Test : Split::Train;
      for (const auto& p : {r.real_path, r.deepfake_path, r.landmark_path}) std::ofstream(p) << "x";
      out.push_back(r);
    }
  }
  return out;
}

TEST(Manifest, RoundTripUsesRelativePaths) {
  const auto dir = testdata::scratch_dir("manifest_roundtrip");
  auto recs = records_in(dir, 3, 2);
  recs[1].dataset = "other";
  save_manifest(recs, dir / "manifest.json");
  std::ifstream in(dir / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("format"), "opr-manifest");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(fs::path(j.at("frames")[0].at("real_path").get<std::string>()).is_relative(), true);
  const auto back = load_manifest(dir / "manifest.json");
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].frame_id, recs[i].frame_id);
    EXPECT_EQ(fs::weakly_canonical(back[i].real_path), fs::weakly_canonical(recs[i].real_path));
    EXPECT_EQ(back[i].split, recs[i].split);
    EXPECT_EQ(back[i].dataset, recs[i].dataset);
  }
  EXPECT_EQ(filter_split(back, Split::Test).size(), 2u);
}

TEST(Manifest, DuplicateFrameIds) {
  const auto dir = testdata::scratch_dir("manifest_dup");
  auto recs = records_in(dir, 2, 2);
  recs[3].frame_id = recs[2].frame_id;
  try {
    validate_records(recs, true);
    FAIL() << "expected DuplicateFrameError";
  } catch (const opr::DuplicateFrameError& e) {
    EXPECT_EQ(e.frame_id(), recs[2].frame_id);
  }
}

TEST(Manifest, ListsEveryMissingFile) {
  const auto dir = testdata::scratch_dir("manifest_missing");
  auto recs = records_in(dir, 2, 2);
  fs::remove(recs[0].real_path);
  fs::remove(recs[3].landmark_path);
  try {
    validate_records(recs, true);
    FAIL() << "expected MissingFilesError";
  } catch (const opr::MissingFilesError& e) {
    EXPECT_EQ(e.missing().size(), 2u);
  }
  EXPECT_NO_THROW(validate_records(recs, false));
}

TEST(Manifest, VideoInBothSplits) {
  const auto dir = testdata::scratch_dir("manifest_leak");
  auto recs = records_in(dir, 2, 2);
  recs[3].split = Split::Test;  // video v1 now straddles the splits
  EXPECT_THROW(validate_records(recs, true), opr::SplitLeakError);
}

TEST(Manifest, VideoWithTwoIdentities) {
  const auto dir = testdata::scratch_dir("manifest_identity");
  auto recs = records_in(dir, 2, 2);
  recs[1].identity_id = "someone_else";
  EXPECT_THROW(validate_records(recs, true), opr::ManifestError);
}

TEST(Manifest, RejectsWrongFormat) {
  const auto dir = testdata::scratch_dir("manifest_format");
  std::ofstream(dir / "m.json") << R"({"format": "something", "version": 1, "frames": []})";
  EXPECT_THROW(load_manifest(dir / "m.json"), opr::ManifestError);
  std::ofstream(dir / "v.json") << R"({"format": "opr-manifest", "version": 9, "frames": []})";
  EXPECT_THROW(load_manifest(dir / "v.json"), opr::ManifestError);
  EXPECT_THROW(split_from_string("val"), opr::Error);
}

}  // namespace
