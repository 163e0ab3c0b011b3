#pragma once

#include <string>
#include <vector>

// Frame- and video-level detection metrics. Positives (label 1) are fakes.
namespace opr::eval {

struct ScoreItem {
  std::string item_id;
  std::string video_id;
  double score = 0.0;
  int label = 0;
};

using ScoreSet = std::vector<ScoreItem>;

// Mann-Whitney AUC; tied scores count one half. Throws SingleClassError
// unless both labels are present.
double auc(const ScoreSet& scores);

// Equal error rate on the ROC polyline: the point where the false-positive
// rate equals the false-negative rate, linearly interpolated between the two
// operating points that bracket it.
double eer(const ScoreSet& scores);

// AUC over per-video mean scores. A video mixing labels is an error.
double video_auc(const ScoreSet& scores);

struct RocPoint {
  double fpr = 0.0;
  double fnr = 1.0;
  double threshold = 0.0;
};

// Operating points for "predict fake when score >= threshold", from the
// empty acceptance set (threshold +inf) down to accepting everything.
std::vector<RocPoint> roc_points(const ScoreSet& scores);

}  // namespace opr::eval
