#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gatsim {

struct CsbmParams {
  std::size_t n = 0;
  double p = 0.0;
  double q = 0.0;
  double mu = 1.0;
  double sigma = 1.0;

  // Throws ParameterError when a field is out of range.
  void validate() const;
  // p > q and both p, q >= log^2(n)/n. Diagnostic only; never enforced.
  bool assumption1() const;

  // p = a log^2(n)/n, q = b log^2(n)/n (natural log).
  static CsbmParams from_scaling(std::size_t n, double a, double b, double mu, double sigma);
};

// Immutable sample of the model. Adjacency is stored in CSR form with each
// neighbor list sorted ascending.
class FeaturedGraph {
 public:
  FeaturedGraph() = default;
  // Builds from an undirected edge list. Rejects self loops, duplicates and
  // out-of-range endpoints.
  FeaturedGraph(CsbmParams params, std::uint64_t seed, std::vector<std::uint8_t> labels,
                std::vector<double> features,
                const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t n() const { return labels_.size(); }
  const CsbmParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint8_t>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {adj_.data() + offsets_[i], adj_.data() + offsets_[i + 1]};
  }
  std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::size_t edge_count() const { return adj_.size() / 2; }
  // Edges (i, j) with i < j in ascending order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  // Copy with the feature vector replaced (same topology and labels).
  FeaturedGraph with_features(std::vector<double> features) const;
  FeaturedGraph with_labels(std::vector<std::uint8_t> labels) const;

 private:
  CsbmParams params_{};
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> labels_;
  std::vector<double> features_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> adj_;
};

struct NeighborhoodStats {
  std::size_t degree = 0;
  std::size_t same_class = 0;
  std::size_t cross_class = 0;
};

// Slack fields hold the left-hand quantity of each inequality and the bound it
// is compared against, so reports can be recomputed from the graph.
struct EventReport {
  // Delta1: ||C0| - n/2| <= 10 sqrt(n log n)
  bool delta1 = false;
  double class_imbalance = 0.0;
  double class_bound = 0.0;
  // Delta2: |N_i| within n(p+q)/2 (1 +- sqrt(log n)/10) for every i
  bool delta2 = false;
  double degree_center = 0.0;
  double degree_halfwidth = 0.0;
  double worst_degree_deviation = 0.0;
  // Delta3: |N_i^p| and |N_i^q| within |N_i| p/(p+q) and |N_i| q/(p+q), same relative band
  bool delta3 = false;
  double worst_split_relative_deviation = 0.0;
  double split_relative_bound = 0.0;
  // Delta4: |X_i - E X_i| <= 10 sigma sqrt(log n) for every i
  bool delta4 = false;
  double worst_feature_deviation = 0.0;
  double feature_bound = 0.0;

  bool all() const { return delta1 && delta2 && delta3 && delta4; }
};

FeaturedGraph sample_csbm(const CsbmParams& params, std::uint64_t seed);

NeighborhoodStats neighborhood_stats(const FeaturedGraph& graph, std::size_t i);

EventReport check_concentration_events(const FeaturedGraph& graph, const CsbmParams& params);

// Text format: header "n p q mu sigma seed", n lines "label feature", then one
// "i j" line per edge with i < j.
void write_graph(std::ostream& out, const FeaturedGraph& graph);
FeaturedGraph read_graph(std::istream& in);

}  // namespace gatsim
