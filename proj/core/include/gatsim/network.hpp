#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gatsim/attention.hpp"
#include "gatsim/csbm.hpp"

namespace gatsim {

struct LayerSchedule {
  std::vector<AttentionSpec> layers;

  // Throws ParameterError when empty or when a layer spec is invalid.
  void validate() const;
  std::size_t size() const { return layers.size(); }
  std::string describe() const;

  static LayerSchedule repeat(const AttentionSpec& spec, std::size_t count);
  static LayerSchedule sign_intensities(const std::vector<double>& ts);
};

struct ForwardTrace {
  // snapshots[0] is the input; snapshots[l] is the output of layer l.
  std::vector<std::vector<double>> snapshots;
  std::size_t isolated_nodes = 0;
};

struct ClassificationResult {
  std::vector<std::int8_t> outputs;  // sgn of the final features, sgn(0) = 0
  std::size_t correct = 0;
  double accuracy = 0.0;
  bool perfect = false;
};

struct NetworkRun {
  ForwardTrace trace;
  ClassificationResult result;
};

// One aggregation step X'_i = sum_j c_ij X_j, coefficients recomputed from
// `features`. Isolated nodes output 0; their count is added to *isolated when
// given, and a warning is logged.
std::vector<double> forward_layer(const FeaturedGraph& graph, std::span<const double> features,
                                  const AttentionSpec& spec, std::size_t* isolated = nullptr);

// Sign readout scored against labels: correct iff sgn(X_i) = 2 eps_i - 1.
ClassificationResult classify(const FeaturedGraph& graph, std::span<const double> features);

// Applies every layer to graph.features(), then the sign readout. With
// keep_trace false only the input and final snapshots are retained.
NetworkRun run_network(const FeaturedGraph& graph, const LayerSchedule& schedule, bool keep_trace = true);

// L = ceil(log n / log(b log^2 n)) Uniform layers then SignSym(t_final), or a
// single SignSym(t_final) layer when snr >= sqrt(log n).
LayerSchedule gatstar_schedule(std::size_t n, double b, double snr, double t_final);

// Four-layer schedule with intensities 0, 0.5, 0.5, 5.
LayerSchedule figure_gatstar_schedule();

}  // namespace gatsim
