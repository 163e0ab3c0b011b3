#include "opr/eval/plots.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "opr/errors.hpp"

namespace opr::eval {
namespace {

const std::array<cv::Scalar, 4> kColours = {cv::Scalar(60, 160, 40), cv::Scalar(220, 150, 30),
                                            cv::Scalar(40, 140, 240), cv::Scalar(50, 40, 210)};

std::vector<cv::Point2d> planar(const EmbeddingDump& dump) {
  if (dump.items.empty()) throw EmptyDumpError("nothing to plot");
  validate_dump(dump);
  std::vector<cv::Point2d> out;
  if (dump.dim == 1) {
    for (const auto& it : dump.items) out.emplace_back(it.vector[0], 0.0);
    return out;
  }
  if (dump.dim == 2) {
    for (const auto& it : dump.items) out.emplace_back(it.vector[0], it.vector[1]);
    return out;
  }
  cv::Mat data(static_cast<int>(dump.items.size()), dump.dim, CV_64F);
  for (int i = 0; i < data.rows; ++i) {
    for (int j = 0; j < dump.dim; ++j) data.at<double>(i, j) = dump.items[i].vector[j];
  }
  cv::PCA pca(data, cv::noArray(), cv::PCA::DATA_AS_ROW, 2);
  cv::Mat proj = pca.project(data);
  for (int i = 0; i < proj.rows; ++i) out.emplace_back(proj.at<double>(i, 0), proj.at<double>(i, 1));
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  cv::Point map(const cv::Point2d& p, int left, int top, int w, int h) const {
    return {left + static_cast<int>((p.x - x0) / (x1 - x0) * (w - 1)),
            top + static_cast<int>((1.0 - (p.y - y0) / (y1 - y0)) * (h - 1))};
  }
};

Frame bounds(const std::vector<cv::Point2d>& pts) {
  Frame f{std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
          std::numeric_limits<double>::max(), -std::numeric_limits<double>::max()};
  for (const auto& p : pts) {
    f.x0 = std::min(f.x0, p.x);
    f.x1 = std::max(f.x1, p.x);
    f.y0 = std::min(f.y0, p.y);
    f.y1 = std::max(f.y1, p.y);
  }
  const double px = std::max(1e-9, 0.05 * (f.x1 - f.x0)), py = std::max(1e-9, 0.05 * (f.y1 - f.y0));
  f.x0 -= px;
  f.x1 += px;
  f.y0 -= py;
  f.y1 += py;
  return f;
}

void save_png(const cv::Mat& img, const std::filesystem::path& path) {
  if (!cv::imwrite(path.string(), img)) throw Error("cannot write plot " + path.string());
}

}  // namespace

void write_scatter_png(const EmbeddingDump& dump, const std::filesystem::path& path, int size) {
  const auto pts = planar(dump);
  const Frame f = bounds(pts);
  cv::Mat img(size, size, CV_8UC3, cv::Scalar(255, 255, 255));
  const int margin = 24;
  cv::rectangle(img, {margin, margin}, {size - margin, size - margin}, cv::Scalar(200, 200, 200));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto k = static_cast<std::size_t>(labels::anchor_index(dump.items[i].kind));
    cv::circle(img, f.map(pts[i], margin, margin, size - 2 * margin, size - 2 * margin), 2, kColours[k], cv::FILLED,
               cv::LINE_AA);
  }
  for (int k = 0; k < 4; ++k) {
    const cv::Point at(margin + 6, margin + 16 + 16 * k);
    cv::circle(img, at, 4, kColours[k], cv::FILLED, cv::LINE_AA);
    cv::putText(img, std::string(labels::to_string(labels::anchor_from_index(k))), at + cv::Point(10, 5),
                cv::FONT_HERSHEY_SIMPLEX, 0.4, cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
  }
  save_png(img, path);
}

void write_density_png(const EmbeddingDump& dump, const std::filesystem::path& path, int cell, int bins) {
  const auto pts = planar(dump);
  const Frame f = bounds(pts);
  std::array<cv::Mat, 4> hist;
  for (auto& h : hist) h = cv::Mat::zeros(bins, bins, CV_32F);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cv::Point p = f.map(pts[i], 0, 0, bins, bins);
    hist[static_cast<std::size_t>(labels::anchor_index(dump.items[i].kind))].at<float>(
        std::clamp(p.y, 0, bins - 1), std::clamp(p.x, 0, bins - 1)) += 1.0f;
  }
  cv::Mat canvas(cell + 20, 4 * cell, CV_8UC3, cv::Scalar(255, 255, 255));
  for (int k = 0; k < 4; ++k) {
    double peak = 0;
    cv::minMaxLoc(hist[k], nullptr, &peak);
    cv::Mat norm, grey, colour;
    hist[k].convertTo(norm, CV_8U, peak > 0 ? 255.0 / peak : 0.0);
    cv::resize(norm, grey, {cell, cell}, 0, 0, cv::INTER_NEAREST);
    cv::applyColorMap(grey, colour, cv::COLORMAP_VIRIDIS);
    colour.copyTo(canvas(cv::Rect(k * cell, 20, cell, cell)));
    cv::putText(canvas, std::string(labels::to_string(labels::anchor_from_index(k))), {k * cell + 4, 14},
                cv::FONT_HERSHEY_SIMPLEX, 0.4, cv::Scalar(0, 0, 0), 1, cv::LINE_AA);
  }
  save_png(canvas, path);
}

void write_plot_csv(const EmbeddingDump& dump, const std::filesystem::path& path) {
  const auto pts = planar(dump);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "item_id,anchor,x,y\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << dump.items[i].item_id << ',' << labels::to_string(dump.items[i].kind) << ',' << pts[i].x << ','
        << pts[i].y << '\n';
  }
}

}  // namespace opr::eval
