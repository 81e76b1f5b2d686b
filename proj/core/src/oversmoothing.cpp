#include "gatsim/oversmoothing.hpp"

#include <algorithm>
#include <cmath>

#include "gatsim/error.hpp"
#include "gatsim/rng.hpp"

namespace gatsim {

double gamma(std::span<const double> features) {
  if (features.empty()) throw ParameterError("gamma needs at least one feature");
  const double n = static_cast<double>(features.size());
  double sum = 0.0;
  for (double x : features) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : features) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / n);
}

SimilarityAxiomReport check_similarity_axioms(std::size_t sample_count, std::uint64_t seed) {
  if (sample_count == 0) throw ParameterError("sample_count must be at least 1");
  constexpr double kTol = 1e-12;
  const CounterRng rng(seed, stream::kAxioms);
  SimilarityAxiomReport report;
  report.samples = sample_count;
  std::uint64_t counter = 0;
  for (std::size_t s = 0; s < sample_count; ++s) {
    const std::size_t len = 2 + static_cast<std::size_t>(rng.uniform(counter++) * 30.0);
    const double scale = std::exp(4.0 * rng.uniform(counter++) - 2.0);
    const double shift = 10.0 * (rng.uniform(counter++) - 0.5);
    std::vector<double> x(len), y(len), sum(len), moved(len), neg(len), flat(len, shift);
    for (std::size_t i = 0; i < len; ++i) {
      x[i] = scale * rng.normal(counter++);
      y[i] = rng.normal(counter++);
      sum[i] = x[i] + y[i];
      moved[i] = x[i] + shift;
      neg[i] = -x[i];
    }
    const double gx = gamma(x);
    const double gy = gamma(y);
    const double excess = gamma(sum) - gx - gy;
    report.max_triangle_excess = std::max(report.max_triangle_excess, excess);
    if (excess > kTol) report.triangle = false;
    if (gamma(flat) > kTol || gx <= kTol) report.zero_iff_constant = false;
    if (std::abs(gamma(moved) - gx) > kTol * std::max(1.0, gx + std::abs(shift))) report.translation = false;
    if (std::abs(gamma(neg) - gx) > kTol * std::max(1.0, gx)) report.negation = false;
  }
  return report;
}

double predicted_decay_factor(double p, double q, const AttentionSpec& spec) {
  if (!(q > 0.0 && p > q)) throw ParameterError("decay factor needs p > q > 0");
  validate_spec(spec);
  if (std::holds_alternative<Uniform>(spec)) return (p - q) / (p + q);
  if (const auto* s = std::get_if<SignSym>(&spec)) return 1.0 - 2.0 * q / (p * std::exp(2.0 * s->t) + q);
  throw ParameterError("no decay factor is defined for XOR attention");
}

SimilarityTrace trace_gamma(const FeaturedGraph& graph, const LayerSchedule& schedule) {
  const auto run = run_network(graph, schedule, true);
  SimilarityTrace trace;
  trace.schedule = schedule.describe();
  trace.params = graph.params();
  trace.gamma_values.reserve(run.trace.snapshots.size());
  for (const auto& snap : run.trace.snapshots) trace.gamma_values.push_back(gamma(snap));
  return trace;
}

DecayFit fit_decay(const SimilarityTrace& trace, double threshold) {
  const auto& g = trace.gamma_values;
  if (g.size() < 3) throw ParameterError("decay fit needs at least 3 gamma values");
  DecayFit fit;
  std::size_t used = 0;
  const double floor = std::max(kGammaRoundingFloor * g[0], 1e-300);
  while (used < g.size() && g[used] > floor) ++used;
  fit.truncated = used < g.size();
  if (used < 2) throw ParameterError("decay fit needs at least 2 positive gamma values");
  fit.layers_used = used;

  const double m = static_cast<double>(used);
  double sx = 0.0, sy = 0.0;
  for (std::size_t l = 0; l < used; ++l) {
    sx += static_cast<double>(l);
    sy += std::log(g[l]);
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t l = 0; l < used; ++l) {
    const double dx = static_cast<double>(l) - mx;
    const double dy = std::log(g[l]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.rate = -fit.slope;
  fit.intercept = my - fit.slope * mx;
  const double resid = std::max(0.0, syy - fit.slope * sxy);
  fit.r_squared = syy > 0.0 ? 1.0 - resid / syy : 1.0;
  fit.oversmoothing = fit.slope <= -threshold;
  return fit;
}

}  // namespace gatsim
