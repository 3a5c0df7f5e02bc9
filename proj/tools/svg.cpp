#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace freqent::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#ff7f0e", "#9467bd", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  Range xr, yr;

  double px(double x) const {
    return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - yr.lo) / (yr.hi - yr.lo) * (kHeight - kTop - kBottom);
  }
};

std::string open_document() {
  return fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" "
      "height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
}

std::string axes(const Frame& f, const PlotLabels& labels) {
  std::string s;
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
  s += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      x0, y0, x1 - x0, y1 - y0);
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.xr.lo + (f.xr.hi - f.xr.lo) * k / 4.0;
    const double yv = f.yr.lo + (f.yr.hi - f.yr.lo) * k / 4.0;
    s += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n"
        "<text x=\"{0:.2f}\" y=\"{3:.2f}\" font-size=\"11\" text-anchor=\"middle\">{4:.3g}</text>\n",
        f.px(xv), y1, y1 + 5.0, y1 + 18.0, xv);
    s += fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n"
        "<text x=\"{3:.2f}\" y=\"{4:.2f}\" font-size=\"11\" text-anchor=\"end\">{5:.3g}</text>\n",
        x0 - 5.0, f.py(yv), x0, x0 - 8.0, f.py(yv) + 4.0, yv);
  }
  s += fmt::format(
      "<text x=\"{:.2f}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
      0.5 * (x0 + x1), escape(labels.title));
  s += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
      0.5 * (x0 + x1), kHeight - 18.0, escape(labels.x_label));
  s += fmt::format(
      "<text x=\"18\" y=\"{0:.2f}\" font-size=\"12\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0:.2f})\">{1}</text>\n",
      0.5 * (y0 + y1), escape(labels.y_label));
  return s;
}

// Piecewise-linear dark blue -> teal -> yellow ramp on [0, 1].
std::string ramp(double t) {
  static constexpr std::array<std::array<double, 3>, 3> stops = {
      {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 2.0;
  const int k = std::min(static_cast<int>(t), 1);
  const double u = t - k;
  int c[3];
  for (int i = 0; i < 3; ++i)
    c[i] = static_cast<int>(std::lround(stops[k][i] + u * (stops[k + 1][i] - stops[k][i])));
  return fmt::format("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
}

}  // namespace

std::string svg_line_plot(const std::vector<Series>& series, const PlotLabels& labels) {
  Frame f;
  for (const auto& s : series) {
    for (double v : s.x) f.xr.add(v);
    for (double v : s.y) f.yr.add(v);
  }
  f.xr.settle();
  f.yr.settle();

  std::string out = open_document() + axes(f, labels);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % kPalette.size()];
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                           color, points);
      points.clear();
    };
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", f.px(s.x[i]), f.py(s.y[i]));
    }
    flush();
    if (!s.name.empty())
      out += fmt::format(
          "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" fill=\"{}\" text-anchor=\"end\">{}</text>\n",
          kWidth - kRight - 6.0, kTop + 14.0 * (k + 1), color, escape(s.name));
  }
  out += "</svg>\n";
  return out;
}

std::string svg_heatmap(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& values, const PlotLabels& labels) {
  Frame f;
  for (double v : x) f.xr.add(v);
  for (double v : y) f.yr.add(v);
  f.xr.settle();
  f.yr.settle();
  Range vr;
  for (double v : values) vr.add(v);
  vr.settle();

  std::string out = open_document();
  const double cw = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(x.size() - 1, 1));
  const double ch = (kHeight - kTop - kBottom) / static_cast<double>(std::max<std::size_t>(y.size() - 1, 1));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double v = values[i * y.size() + j];
      if (!std::isfinite(v)) continue;
      // Cells straddle their sample point; clip to the frame.
      const double cx0 = std::max(f.px(x[i]) - 0.5 * cw, kLeft);
      const double cx1 = std::min(f.px(x[i]) + 0.5 * cw, kWidth - kRight);
      const double cy0 = std::max(f.py(y[j]) - 0.5 * ch, kTop);
      const double cy1 = std::min(f.py(y[j]) + 0.5 * ch, kHeight - kBottom);
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         cx0, cy0, cx1 - cx0, cy1 - cy0, ramp((v - vr.lo) / (vr.hi - vr.lo)));
    }
  }
  out += axes(f, labels);
  out += "</svg>\n";
  return out;
}

}  // namespace freqent::cli
