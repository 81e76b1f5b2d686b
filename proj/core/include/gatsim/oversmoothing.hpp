#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gatsim/attention.hpp"
#include "gatsim/csbm.hpp"
#include "gatsim/network.hpp"

namespace gatsim {

// (1/sqrt(n)) ||X - mean(X) 1||, the population standard deviation.
double gamma(std::span<const double> features);

struct SimilarityAxiomReport {
  std::size_t samples = 0;
  bool zero_iff_constant = true;
  bool triangle = true;
  bool translation = true;
  bool negation = true;
  double max_triangle_excess = 0.0;  // max of gamma(X+Y) - gamma(X) - gamma(Y)

  bool passed() const { return zero_iff_constant && triangle && translation && negation; }
};

// Checks the similarity-measure axioms on `sample_count` random vector pairs.
SimilarityAxiomReport check_similarity_axioms(std::size_t sample_count, std::uint64_t seed);

// Uniform: (p-q)/(p+q). SignSym(t): (p e^2t - q)/(p e^2t + q). Requires p > q > 0.
double predicted_decay_factor(double p, double q, const AttentionSpec& spec);

struct SimilarityTrace {
  std::vector<double> gamma_values;  // layer 0 is the input
  std::string schedule;
  CsbmParams params;
};

SimilarityTrace trace_gamma(const FeaturedGraph& graph, const LayerSchedule& schedule);

struct DecayFit {
  double slope = 0.0;      // least-squares slope of log gamma against layer
  double rate = 0.0;       // -slope, the per-layer log-decay rate
  double intercept = 0.0;  // fitted log gamma at layer 0
  double r_squared = 0.0;
  std::size_t layers_used = 0;
  bool truncated = false;  // gamma reached the rounding floor before the last layer
  bool oversmoothing = false;
};

// Largest gamma(l) / gamma(0) treated as rounding noise; below it the trace
// stops carrying signal and is left out of the fit.
inline constexpr double kGammaRoundingFloor = 1e-12;

// Fits log gamma(l) = intercept + slope * l over the prefix with
// gamma(l) > kGammaRoundingFloor * gamma(0).
// The verdict is slope <= -threshold.
DecayFit fit_decay(const SimilarityTrace& trace, double threshold = 0.01);

}  // namespace gatsim
