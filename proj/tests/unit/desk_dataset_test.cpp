#include <random>

#include <gtest/gtest.h>
#include <opencv2/imgcodecs.hpp>

#include "oracles.hpp"
#include "opr/data/desk_dataset.hpp"
#include "opr/data/manifest.hpp"
#include "opr/synth/blend.hpp"
#include "opr/synth/landmarks.hpp"
#include "test_data.hpp"

namespace {

using namespace opr::data;

FaceGeometry centred(int n) { return {n / 2.0, n / 2.0, n * 0.3, n * 0.38, 0.05}; }

TEST(Desk, ZeroCuesReproduceTheRealFrame) {
  const auto look = random_look(1), donor = random_look(2);
  const cv::Mat real = render_face(look, centred(32), {32, 32}, 3);
  for (auto kind : {ArtifactKind::Checkerboard, ArtifactKind::Stripes, ArtifactKind::Speckle}) {
    const cv::Mat fake = forge_face(real, donor, centred(32), {0, 0, 0}, kind, 4);
    EXPECT_EQ(cv::norm(fake, real, cv::NORM_INF), 0.0);
  }
}

TEST(Desk, ForgeryStaysOnTheFace) {
  const auto g = centred(32);
  const cv::Mat real = render_face(random_look(1), g, {32, 32}, 3);
  const cv::Mat fake = forge_face(real, random_look(2), g, {}, ArtifactKind::Checkerboard, 4);
  // corners are background
  for (auto p : {cv::Point(0, 0), cv::Point(31, 0), cv::Point(0, 31), cv::Point(31, 31)}) {
    EXPECT_EQ(fake.at<cv::Vec3b>(p), real.at<cv::Vec3b>(p));
  }
  EXPECT_GT(cv::norm(fake, real, cv::NORM_L1), 0.0);
}

TEST(Desk, TemplateLandmarksFitTheFrame) {
  const auto lm = template_landmarks(centred(32));
  EXPECT_EQ(lm.count(), static_cast<std::size_t>(kTemplateLandmarks));
  EXPECT_NO_THROW(opr::synth::validate_landmarks(lm, {32, 32}));
  EXPECT_NO_THROW(opr::synth::face_hull(lm));
}

TEST(Desk, StrongerArtifactsAreEasierForAFixedBaseline) {
  // Laplacian energy needs no training; its real-vs-fake AUC must grow with
  // the artifact amplitude when the other cues are off.
  std::mt19937_64 rng(5);
  double previous = 0.0;
  for (double amp : {0.0, 4.0, 12.0, 30.0}) {
    opr::eval::ScoreSet s;
    for (int i = 0; i < 40; ++i) {
      auto g = centred(32);
      g.cx += (i % 5) - 2;
      const cv::Mat real = render_face(random_look(100 + i), g, {32, 32}, 200 + i);
      const cv::Mat fake = forge_face(real, random_look(300 + i), g, {0, 0, amp}, ArtifactKind::Checkerboard, i);
      s.push_back({"r" + std::to_string(i), "r", laplacian_energy_score(real), 0});
      s.push_back({"f" + std::to_string(i), "f", laplacian_energy_score(fake), 1});
    }
    const double a = oracle::pairwise_auc(s);
    EXPECT_GE(a, previous - 1e-12) << "amplitude " << amp;
    previous = a;
  }
  EXPECT_GT(previous, 0.95);
}

TEST(Desk, GeneratorIsDeterministicAndSplitsByVideo) {
  DeskSpec spec;
  spec.image_size = 16;
  spec.train_videos = 3;
  spec.test_videos = 1;
  spec.frames_per_video = 2;
  spec.test_frames_per_video = 2;
  spec.seed = 4;
  const auto a = load_manifest(synth_desk_dataset(spec, testdata::scratch_dir("desk_a")));
  const auto b = load_manifest(synth_desk_dataset(spec, testdata::scratch_dir("desk_b")));
  ASSERT_EQ(a.size(), 8u);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].frame_id, b[i].frame_id);
    const cv::Mat x = cv::imread(a[i].deepfake_path.string()), y = cv::imread(b[i].deepfake_path.string());
    EXPECT_EQ(cv::norm(x, y, cv::NORM_INF), 0.0);
  }
  EXPECT_EQ(filter_split(a, Split::Test).size(), 2u);
  EXPECT_EQ(filter_split(a, Split::Test)[0].dataset, "desk-cueshift");
}

TEST(Desk, SpecJsonRoundTrip) {
  DeskSpec spec;
  spec.test_cues.artifact = 3;
  spec.test_artifact = ArtifactKind::Stripes;
  const DeskSpec back = nlohmann::json(spec).get<DeskSpec>();
  EXPECT_EQ(back.test_cues.artifact, 3);
  EXPECT_EQ(back.test_artifact, ArtifactKind::Stripes);
  EXPECT_EQ(artifact_from_string(to_string(ArtifactKind::Speckle)), ArtifactKind::Speckle);
}

}  // namespace
