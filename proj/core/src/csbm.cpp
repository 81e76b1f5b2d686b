#include "gatsim/csbm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>

#include "gatsim/error.hpp"
#include "gatsim/log.hpp"
#include "gatsim/rng.hpp"

namespace gatsim {

namespace {

void warn_assumption1_once(const CsbmParams& params) {
  static std::mutex mutex;
  static std::set<std::pair<double, double>> seen;
  std::lock_guard lock(mutex);
  if (!seen.emplace(params.p, params.q).second) return;
  std::ostringstream msg;
  msg << "p=" << params.p << " <= q=" << params.q
      << ": intra-class edges are not denser than inter-class edges (assumption flag false)";
  log_warning(msg.str());
}

}  // namespace

void CsbmParams::validate() const {
  if (n < 2) throw ParameterError("n must be at least 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p must lie in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("q must lie in [0, 1]");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be positive and finite");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be positive and finite");
}

bool CsbmParams::assumption1() const {
  const double ln = std::log(static_cast<double>(n));
  const double floor = ln * ln / static_cast<double>(n);
  return p > q && q >= floor;
}

CsbmParams CsbmParams::from_scaling(std::size_t n, double a, double b, double mu, double sigma) {
  if (n < 2) throw ParameterError("n must be at least 2");
  const double ln = std::log(static_cast<double>(n));
  const double unit = ln * ln / static_cast<double>(n);
  CsbmParams params{n, a * unit, b * unit, mu, sigma};
  params.validate();
  return params;
}

FeaturedGraph::FeaturedGraph(CsbmParams params, std::uint64_t seed, std::vector<std::uint8_t> labels,
                             std::vector<double> features,
                             const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : params_(params), seed_(seed), labels_(std::move(labels)), features_(std::move(features)) {
  const std::size_t n = labels_.size();
  if (features_.size() != n) throw ParameterError("labels and features differ in length");
  if (n > 0xffffffffULL) throw ParameterError("graph too large for 32-bit node indices");
  for (auto l : labels_)
    if (l > 1) throw ParameterError("labels must be 0 or 1");

  std::vector<std::size_t> degree(n, 0);
  for (auto [i, j] : edges) {
    if (i >= n || j >= n) throw ParameterError("edge endpoint out of range");
    if (i == j) throw ParameterError("self loop on node " + std::to_string(i));
    ++degree[i];
    ++degree[j];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  adj_.resize(offsets_[n]);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (auto [i, j] : edges) {
    adj_[cursor[i]++] = static_cast<std::uint32_t>(j);
    adj_[cursor[j]++] = static_cast<std::uint32_t>(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto first = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    auto last = adj_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    std::sort(first, last);
    if (std::adjacent_find(first, last) != last)
      throw ParameterError("duplicate edge at node " + std::to_string(i));
  }
}

std::vector<std::pair<std::size_t, std::size_t>> FeaturedGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count());
  for (std::size_t i = 0; i < n(); ++i)
    for (auto j : neighbors(i))
      if (i < j) out.emplace_back(i, j);
  return out;
}

FeaturedGraph FeaturedGraph::with_features(std::vector<double> features) const {
  if (features.size() != n()) throw ParameterError("feature vector length must equal n");
  FeaturedGraph copy = *this;
  copy.features_ = std::move(features);
  return copy;
}

FeaturedGraph FeaturedGraph::with_labels(std::vector<std::uint8_t> labels) const {
  if (labels.size() != n()) throw ParameterError("label vector length must equal n");
  for (auto l : labels)
    if (l > 1) throw ParameterError("labels must be 0 or 1");
  FeaturedGraph copy = *this;
  copy.labels_ = std::move(labels);
  return copy;
}

FeaturedGraph sample_csbm(const CsbmParams& params, std::uint64_t seed) {
  params.validate();
  if (params.p <= params.q) warn_assumption1_once(params);
  const std::size_t n = params.n;
  const CounterRng label_rng(seed, stream::kLabels);
  const CounterRng edge_rng(seed, stream::kEdges);
  const CounterRng feature_rng(seed, stream::kFeatures);

  std::vector<std::uint8_t> labels(n);
  std::vector<double> features(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = label_rng.uniform(i) < 0.5 ? 0 : 1;
    const double mean = labels[i] ? params.mu : -params.mu;
    features[i] = mean + params.sigma * feature_rng.normal(i);
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  const double expected = 0.5 * static_cast<double>(n) * static_cast<double>(n) * std::max(params.p, params.q);
  edges.reserve(static_cast<std::size_t>(std::min(expected * 1.1 + 16.0, 5e7)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prob = labels[i] == labels[j] ? params.p : params.q;
      if (edge_rng.uniform(i * n + j) < prob) edges.emplace_back(i, j);
    }
  }
  return FeaturedGraph(params, seed, std::move(labels), std::move(features), edges);
}

NeighborhoodStats neighborhood_stats(const FeaturedGraph& graph, std::size_t i) {
  if (i >= graph.n()) throw ParameterError("node index " + std::to_string(i) + " out of range");
  NeighborhoodStats stats;
  const auto label = graph.labels()[i];
  for (auto j : graph.neighbors(i)) {
    ++stats.degree;
    if (graph.labels()[j] == label)
      ++stats.same_class;
    else
      ++stats.cross_class;
  }
  return stats;
}

EventReport check_concentration_events(const FeaturedGraph& graph, const CsbmParams& params) {
  EventReport report;
  const auto n = static_cast<double>(graph.n());
  const double ln = std::log(n);
  const double band = std::sqrt(ln) / 10.0;

  std::size_t c0 = 0;
  for (auto l : graph.labels()) c0 += (l == 0);
  report.class_imbalance = std::abs(static_cast<double>(c0) - n / 2.0);
  report.class_bound = 10.0 * std::sqrt(n * ln);
  report.delta1 = report.class_imbalance <= report.class_bound;

  report.degree_center = n * (params.p + params.q) / 2.0;
  report.degree_halfwidth = report.degree_center * band;
  report.split_relative_bound = band;
  report.feature_bound = 10.0 * params.sigma * std::sqrt(ln);
  const double share_p = params.p + params.q > 0.0 ? params.p / (params.p + params.q) : 0.0;
  const double share_q = params.p + params.q > 0.0 ? params.q / (params.p + params.q) : 0.0;

  bool split_ok = true;
  for (std::size_t i = 0; i < graph.n(); ++i) {
    const auto stats = neighborhood_stats(graph, i);
    const double deg = static_cast<double>(stats.degree);
    report.worst_degree_deviation = std::max(report.worst_degree_deviation, std::abs(deg - report.degree_center));

    const double want_p = deg * share_p;
    const double want_q = deg * share_q;
    for (auto [have, want] : {std::pair{static_cast<double>(stats.same_class), want_p},
                              std::pair{static_cast<double>(stats.cross_class), want_q}}) {
      if (want > 0.0) {
        const double rel = std::abs(have - want) / want;
        report.worst_split_relative_deviation = std::max(report.worst_split_relative_deviation, rel);
        if (rel > band) split_ok = false;
      } else if (have != 0.0) {
        split_ok = false;
      }
    }

    const double mean = graph.labels()[i] ? params.mu : -params.mu;
    report.worst_feature_deviation = std::max(report.worst_feature_deviation, std::abs(graph.features()[i] - mean));
  }
  report.delta2 = report.worst_degree_deviation <= report.degree_halfwidth;
  report.delta3 = split_ok;
  report.delta4 = report.worst_feature_deviation <= report.feature_bound;
  return report;
}

void write_graph(std::ostream& out, const FeaturedGraph& graph) {
  const auto old_precision = out.precision(17);
  const auto& pr = graph.params();
  out << pr.n << ' ' << pr.p << ' ' << pr.q << ' ' << pr.mu << ' ' << pr.sigma << ' ' << graph.seed() << '\n';
  for (std::size_t i = 0; i < graph.n(); ++i)
    out << static_cast<int>(graph.labels()[i]) << ' ' << graph.features()[i] << '\n';
  for (auto [i, j] : graph.edges()) out << i << ' ' << j << '\n';
  out.precision(old_precision);
}

FeaturedGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](bool required) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    if (required) throw ParseError("unexpected end of input", line_no + 1);
    return false;
  };

  next_line(true);
  CsbmParams params;
  std::uint64_t seed = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> params.n >> params.p >> params.q >> params.mu >> params.sigma >> seed) || (header >> extra))
      throw ParseError("header must be 'n p q mu sigma seed'", line_no);
  }
  try {
    params.validate();
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), line_no);
  }

  std::vector<std::uint8_t> labels(params.n);
  std::vector<double> features(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    next_line(true);
    std::istringstream row(line);
    int label = -1;
    std::string extra;
    if (!(row >> label >> features[i]) || (row >> extra) || (label != 0 && label != 1))
      throw ParseError("node line must be 'label feature' with label 0 or 1", line_no);
    labels[i] = static_cast<std::uint8_t>(label);
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (next_line(false)) {
    std::istringstream row(line);
    long long i = -1, j = -1;
    std::string extra;
    if (!(row >> i >> j) || (row >> extra)) throw ParseError("edge line must be 'i j'", line_no);
    if (i < 0 || j < 0 || static_cast<std::size_t>(j) >= params.n || i >= j)
      throw ParseError("edge endpoints must satisfy 0 <= i < j < n", line_no);
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  try {
    return FeaturedGraph(params, seed, std::move(labels), std::move(features), edges);
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), line_no);
  }
}

}  // namespace gatsim
