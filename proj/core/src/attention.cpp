#include "gatsim/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gatsim/error.hpp"

namespace gatsim {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

void validate_spec(const AttentionSpec& spec) {
  std::visit(Overloaded{
                 [](const Uniform&) {},
                 [](const SignSym& s) {
                   if (!(s.t >= 0.0) || !std::isfinite(s.t))
                     throw ParameterError("attention intensity t must be finite and >= 0");
                 },
                 [](const XorNet& x) {
                   if (!(x.R > 0.0) || !std::isfinite(x.R)) throw ParameterError("XOR scale R must be > 0");
                   if (!(x.beta > 0.0 && x.beta < 1.0)) throw ParameterError("XOR slope beta must lie in (0, 1)");
                 },
             },
             spec);
}

std::string describe(const AttentionSpec& spec) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const Uniform&) { out << "uniform"; },
                 [&](const SignSym& s) { out << "sign(t=" << s.t << ")"; },
                 [&](const XorNet& x) { out << "xor(R=" << x.R << ",beta=" << x.beta << ")"; },
             },
             spec);
  return out.str();
}

double psi_sign(double xi, double xj, double t) { return xi * xj >= 0.0 ? t : -t; }

double psi_xor(double xi, double xj, double R, double beta) {
  const double scale = 2.0 * R * (1.0 - beta);
  const double a = std::abs(xi);
  if (xj <= -a) return -scale * xi;
  if (xj >= a) return scale * xi;
  const double sgn = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
  return scale * sgn * xj;
}

double attention_weights(std::span<const double> features, std::size_t i, std::span<const std::uint32_t> neighbors,
                         const AttentionSpec& spec, std::vector<double>& weights) {
  const std::size_t k = neighbors.size();
  weights.resize(k);
  const double xi = features[i];
  double total = 0.0;

  if (std::holds_alternative<Uniform>(spec)) {
    std::fill(weights.begin(), weights.end(), 1.0);
    return static_cast<double>(k);
  }
  if (const auto* s = std::get_if<SignSym>(&spec)) {
    // Scores take only the values +t and -t, so after max subtraction the
    // weights are 1 and exp(-2t), or all 1 when no neighbor agrees in sign.
    bool any_agree = false;
    for (auto j : neighbors) {
      if (xi * features[j] >= 0.0) {
        any_agree = true;
        break;
      }
    }
    const double low = any_agree ? std::exp(-2.0 * s->t) : 1.0;
    for (std::size_t m = 0; m < k; ++m) {
      weights[m] = xi * features[neighbors[m]] >= 0.0 ? 1.0 : low;
      total += weights[m];
    }
    return total;
  }
  const auto& x = std::get<XorNet>(spec);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < k; ++m) {
    weights[m] = psi_xor(xi, features[neighbors[m]], x.R, x.beta);
    top = std::max(top, weights[m]);
  }
  for (auto& w : weights) {
    w = std::exp(w - top);
    total += w;
  }
  return total;
}

CoefficientRow attention_coefficients(std::span<const double> features, std::size_t i,
                                      std::span<const std::uint32_t> neighbors, const AttentionSpec& spec) {
  validate_spec(spec);
  if (i >= features.size()) throw ParameterError("node index out of range");
  if (neighbors.empty()) throw IsolatedNodeError(i);
  for (auto j : neighbors)
    if (j >= features.size()) throw ParameterError("neighbor index out of range");

  CoefficientRow row;
  row.node = i;
  row.neighbors.assign(neighbors.begin(), neighbors.end());
  const double total = attention_weights(features, i, neighbors, spec, row.coefficients);
  for (auto& c : row.coefficients) c /= total;
  return row;
}

}  // namespace gatsim
