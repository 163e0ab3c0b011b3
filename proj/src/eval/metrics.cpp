#include "opr/eval/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "opr/errors.hpp"

namespace opr::eval {
namespace {

void count_classes(const ScoreSet& scores, double& pos, double& neg) {
  pos = neg = 0;
  for (const auto& s : scores) {
    if (s.label != 0 && s.label != 1) throw Error("score labels must be 0 or 1");
    (s.label == 1 ? pos : neg) += 1;
  }
  if (pos == 0 || neg == 0) throw SingleClassError("metric needs at least one positive and one negative item");
}

}  // namespace

double auc(const ScoreSet& scores) {
  double pos = 0, neg = 0;
  count_classes(scores, pos, neg);
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a].score < scores[b].score; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]].score == scores[idx[i]].score) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (scores[idx[k]].label == 1) rank_sum += avg_rank;
    }
    i = j;
  }
  return (rank_sum - pos * (pos + 1) / 2.0) / (pos * neg);
}

std::vector<RocPoint> roc_points(const ScoreSet& scores) {
  double pos = 0, neg = 0;
  count_classes(scores, pos, neg);
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a].score > scores[b].score; });
  std::vector<RocPoint> pts{{0.0, 1.0, std::numeric_limits<double>::infinity()}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    const double t = scores[idx[i]].score;
    while (i < idx.size() && scores[idx[i]].score == t) {
      (scores[idx[i]].label == 1 ? tp : fp) += 1;
      ++i;
    }
    pts.push_back({fp / neg, (pos - tp) / pos, t});
  }
  return pts;
}

double eer(const ScoreSet& scores) {
  const auto pts = roc_points(scores);
  // fpr - fnr rises from -1 to +1 along the polyline.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = pts[i].fpr - pts[i].fnr;
    if (d == 0.0) return pts[i].fpr;
    if (d > 0.0) {
      const auto& a = pts[i - 1];
      const auto& b = pts[i];
      const double da = a.fpr - a.fnr;
      const double t = -da / (d - da);
      return a.fpr + t * (b.fpr - a.fpr);
    }
  }
  return pts.back().fpr;
}

double video_auc(const ScoreSet& scores) {
  struct Acc {
    double sum = 0;
    int n = 0;
    int label = -1;
  };
  std::map<std::string, Acc> videos;
  for (const auto& s : scores) {
    if (s.video_id.empty()) throw Error("video-level AUC needs a video_id on every item");
    Acc& a = videos[s.video_id];
    if (a.label >= 0 && a.label != s.label) throw Error("video '" + s.video_id + "' mixes real and fake frames");
    a.label = s.label;
    a.sum += s.score;
    ++a.n;
  }
  ScoreSet per_video;
  per_video.reserve(videos.size());
  for (const auto& [id, a] : videos) per_video.push_back({id, id, a.sum / a.n, a.label});
  return auc(per_video);
}

}  // namespace opr::eval
