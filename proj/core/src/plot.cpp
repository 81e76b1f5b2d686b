#include "gatsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "gatsim/error.hpp"

namespace gatsim {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

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

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

}  // namespace

PlotKind infer_plot_kind(const CsvTable& table) {
  const auto& c = table.columns();
  auto has = [&](const char* name) { return std::find(c.begin(), c.end(), name) != c.end(); };
  if (has("layer") && has("gamma") && has("t")) return PlotKind::GammaVsLayer;
  if (has("model") && has("snr") && has("mean_accuracy")) return PlotKind::AccuracyVsSnr;
  if ((has("a") || has("mu")) && has("t") && has("mean_accuracy")) return PlotKind::AccuracyVsT;
  throw ParseError("CSV header does not match any plot kind", 1);
}

std::string render_plot(const CsvTable& table, const PlotOptions& options) {
  const PlotKind kind = options.kind == PlotKind::Auto ? infer_plot_kind(table) : options.kind;
  std::string group_col, x_col, y_col, x_label, y_label;
  bool log_x = false;
  switch (kind) {
    case PlotKind::AccuracyVsT: {
      const auto& c = table.columns();
      group_col = std::find(c.begin(), c.end(), "a") != c.end() ? "a" : "mu";
      x_col = "t";
      y_col = "mean_accuracy";
      x_label = "attention intensity t";
      y_label = "accuracy";
      break;
    }
    case PlotKind::GammaVsLayer:
      group_col = "t";
      x_col = "layer";
      y_col = "gamma";
      x_label = "layer";
      y_label = "gamma";
      break;
    case PlotKind::AccuracyVsSnr:
      group_col = "model";
      x_col = "snr";
      y_col = "mean_accuracy";
      x_label = "SNR (log scale)";
      y_label = "accuracy";
      log_x = true;
      break;
    case PlotKind::Auto: break;
  }
  const bool log_y = options.log_scale;
  if (log_y) y_label = "log10 " + y_label;

  const auto groups = table.text_column(group_col);
  const auto xs = table.numeric_column(x_col);
  const auto ys = table.numeric_column(y_col);

  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (std::size_t r = 0; r < xs.size(); ++r) {
    double x = xs[r];
    double y = ys[r];
    if (log_x) {
      if (!(x > 0.0)) continue;
      x = std::log10(x);
    }
    if (log_y) {
      if (!(y > 0.0)) continue;
      y = std::log10(y);
    }
    auto [it, fresh] = index.emplace(groups[r], series.size());
    if (fresh) series.push_back({group_col + "=" + groups[r], {}});
    series[it->second].points.emplace_back(x, y);
  }

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  double marker_x = std::numeric_limits<double>::quiet_NaN();
  if (options.marker && (!log_x || *options.marker > 0.0)) {
    marker_x = log_x ? std::log10(*options.marker) : *options.marker;
    x_min = std::min(x_min, marker_x);
    x_max = std::max(x_max, marker_x);
  }
  if (!std::isfinite(x_min)) x_min = 0.0, x_max = 1.0;
  if (!std::isfinite(y_min)) y_min = 0.0, y_max = 1.0;
  if (x_max == x_min) x_min -= 0.5, x_max += 0.5;
  if (y_max == y_min) y_min -= 0.5, y_max += 0.5;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty())
    svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(options.title) << "</text>\n";
  svg << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w) << "\" height=\""
      << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_min + (x_max - x_min) * i / kTicks;
    const double fy = y_min + (y_max - y_min) * i / kTicks;
    const double lx = log_x ? std::pow(10.0, fx) : fx;
    svg << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(px(fx)) << "\" y2=\""
        << fmt(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(kTop + plot_h + 18) << "\" text-anchor=\"middle\">"
        << tick_label(lx) << "</text>\n";
    svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(fy)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(py(fy)) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(fy) + 4) << "\" text-anchor=\"end\">"
        << tick_label(fy) << "</text>\n";
  }
  svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 10) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << fmt(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";

  if (std::isfinite(marker_x))
    svg << "<line x1=\"" << fmt(px(marker_x)) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(px(marker_x))
        << "\" y2=\"" << fmt(kTop + plot_h) << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < series[s].points.size(); ++k) {
      const auto [x, y] = series[s].points[k];
      svg << (k ? " " : "") << fmt(px(x)) << ',' << fmt(py(y));
    }
    svg << "\"/>\n";
    const double ly = kTop + 12.0 + 18.0 * static_cast<double>(s);
    svg << "<line x1=\"" << fmt(kWidth - kRight + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(kWidth - kRight + 32)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(kWidth - kRight + 38) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(series[s].name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::string& csv_path, const std::string& svg_path, const PlotOptions& options) {
  const auto table = CsvTable::load(csv_path);
  const auto svg = render_plot(table, options);
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + svg_path);
  out << svg;
}

}  // namespace gatsim
