#include "opr/synth/landmarks.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "opr/errors.hpp"

namespace opr::synth {

cv::Point2d LandmarkSet::centroid() const {
  cv::Point2d c(0, 0);
  if (points.empty()) return c;
  for (const auto& p : points) c += p;
  return c * (1.0 / static_cast<double>(points.size()));
}

void validate_landmarks(const LandmarkSet& landmarks, cv::Size image_size) {
  if (landmarks.points.empty()) throw Error("landmark set is empty");
  for (std::size_t i = 0; i < landmarks.points.size(); ++i) {
    const auto& p = landmarks.points[i];
    if (!(p.x >= 0.0 && p.y >= 0.0 && p.x < image_size.width && p.y < image_size.height)) {
      std::ostringstream os;
      os << "landmark " << i << " at (" << p.x << ", " << p.y << ") lies outside the " << image_size.width << "x"
         << image_size.height << " image";
      throw Error(os.str());
    }
  }
}

LandmarkSet load_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open landmark file " + path.string());
  LandmarkSet set;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    double x = 0, y = 0;
    if (!(row >> x >> y)) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected two coordinates");
    }
    set.points.emplace_back(x, y);
  }
  return set;
}

void save_landmarks(const LandmarkSet& landmarks, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write landmark file " + path.string());
  out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : landmarks.points) out << p.x << ' ' << p.y << '\n';
}

double landmark_distance(const LandmarkSet& a, const LandmarkSet& b) {
  if (a.count() != b.count() || a.count() == 0) {
    throw Error("landmark sets must have equal, non-zero counts (" + std::to_string(a.count()) + " vs " +
                std::to_string(b.count()) + ")");
  }
  const cv::Point2d ca = a.centroid(), cb = b.centroid();
  double total = 0.0;
  for (std::size_t i = 0; i < a.count(); ++i) {
    const cv::Point2d d = (a.points[i] - ca) - (b.points[i] - cb);
    total += std::sqrt(d.x * d.x + d.y * d.y);
  }
  return total / static_cast<double>(a.count());
}

LandmarkMatch find_landmark_match(const LandmarkSet& query, const std::vector<PoolEntry>& pool,
                                  std::string_view exclude_identity) {
  const PoolEntry* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const PoolEntry& e : pool) {
    if (!exclude_identity.empty() && e.identity_id == exclude_identity) continue;
    const double d = landmark_distance(query, e.landmarks);
    if (best == nullptr || d < best_dist || (d == best_dist && e.frame_id < best->frame_id)) {
      best = &e;
      best_dist = d;
    }
  }
  if (best == nullptr) throw EmptyPoolError("no landmark-match candidates left after identity exclusion");
  return {best->frame_id, best_dist};
}

}  // namespace opr::synth
