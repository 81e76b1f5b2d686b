#pragma once

#include <optional>
#include <string>

#include "gatsim/csv.hpp"

namespace gatsim {

enum class PlotKind { Auto, AccuracyVsT, GammaVsLayer, AccuracyVsSnr };

struct PlotOptions {
  PlotKind kind = PlotKind::Auto;
  bool log_scale = false;  // log10 y axis
  std::optional<double> marker;
  std::string title;
};

// Picks the kind from the header: (a|mu, t, mean_accuracy), (t, layer, gamma)
// or (model, snr, mean_accuracy). Throws ParseError for other headers.
PlotKind infer_plot_kind(const CsvTable& table);

// Static SVG line plot, one polyline per value of the first column. Output is
// a pure function of the table and options.
std::string render_plot(const CsvTable& table, const PlotOptions& options);

void emit_plot(const std::string& csv_path, const std::string& svg_path, const PlotOptions& options);

}  // namespace gatsim
