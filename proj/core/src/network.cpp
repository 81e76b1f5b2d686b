#include "gatsim/network.hpp"

#include <cmath>
#include <sstream>

#include "gatsim/error.hpp"
#include "gatsim/log.hpp"

namespace gatsim {

void LayerSchedule::validate() const {
  if (layers.empty()) throw ParameterError("layer schedule must contain at least one layer");
  for (const auto& spec : layers) validate_spec(spec);
}

std::string LayerSchedule::describe() const {
  std::ostringstream out;
  for (std::size_t l = 0; l < layers.size(); ++l) out << (l ? "," : "") << gatsim::describe(layers[l]);
  return out.str();
}

LayerSchedule LayerSchedule::repeat(const AttentionSpec& spec, std::size_t count) {
  return LayerSchedule{std::vector<AttentionSpec>(count, spec)};
}

LayerSchedule LayerSchedule::sign_intensities(const std::vector<double>& ts) {
  LayerSchedule schedule;
  for (double t : ts) schedule.layers.emplace_back(SignSym{t});
  return schedule;
}

std::vector<double> forward_layer(const FeaturedGraph& graph, std::span<const double> features,
                                  const AttentionSpec& spec, std::size_t* isolated) {
  validate_spec(spec);
  const std::size_t n = graph.n();
  if (features.size() != n) throw ParameterError("feature vector length must equal n");
  std::vector<double> out(n, 0.0);
  std::vector<double> weights;
  std::size_t lonely = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nbrs = graph.neighbors(i);
    if (nbrs.empty()) {
      ++lonely;
      continue;
    }
    const double total = attention_weights(features, i, nbrs, spec, weights);
    double acc = 0.0;
    for (std::size_t m = 0; m < nbrs.size(); ++m) acc += weights[m] * features[nbrs[m]];
    out[i] = acc / total;
  }
  if (lonely > 0) {
    log_warning(std::to_string(lonely) + " isolated node(s) output 0 in a forward layer");
    if (isolated) *isolated += lonely;
  }
  return out;
}

ClassificationResult classify(const FeaturedGraph& graph, std::span<const double> features) {
  if (features.size() != graph.n()) throw ParameterError("feature vector length must equal n");
  ClassificationResult result;
  result.outputs.resize(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    const double x = features[i];
    const std::int8_t s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
    result.outputs[i] = s;
    const std::int8_t want = graph.labels()[i] ? 1 : -1;
    result.correct += (s == want);
  }
  result.accuracy = features.empty() ? 0.0 : static_cast<double>(result.correct) / static_cast<double>(features.size());
  result.perfect = !features.empty() && result.correct == features.size();
  return result;
}

NetworkRun run_network(const FeaturedGraph& graph, const LayerSchedule& schedule, bool keep_trace) {
  schedule.validate();
  NetworkRun run;
  run.trace.snapshots.push_back(graph.features());
  std::vector<double> current = graph.features();
  for (const auto& spec : schedule.layers) {
    current = forward_layer(graph, current, spec, &run.trace.isolated_nodes);
    if (keep_trace) run.trace.snapshots.push_back(current);
  }
  if (!keep_trace) run.trace.snapshots.push_back(current);
  run.result = classify(graph, current);
  return run;
}

LayerSchedule gatstar_schedule(std::size_t n, double b, double snr, double t_final) {
  if (n < 16) throw ParameterError("gatstar_schedule requires n >= 16");
  if (!(b > 0.0)) throw ParameterError("gatstar_schedule requires b > 0");
  const double ln = std::log(static_cast<double>(n));
  LayerSchedule schedule;
  if (snr >= std::sqrt(ln)) {
    schedule.layers.emplace_back(SignSym{t_final});
    schedule.validate();
    return schedule;
  }
  const double growth = b * ln * ln;
  if (growth <= 1.0) throw ParameterError("gatstar schedule undefined: b log^2 n <= 1");
  const auto conv_layers = static_cast<std::size_t>(std::ceil(ln / std::log(growth)));
  schedule.layers.assign(conv_layers, Uniform{});
  schedule.layers.emplace_back(SignSym{t_final});
  schedule.validate();
  return schedule;
}

LayerSchedule figure_gatstar_schedule() { return LayerSchedule::sign_intensities({0.0, 0.5, 0.5, 5.0}); }

}  // namespace gatsim
