#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gatsim {

struct Uniform {};
struct SignSym {
  double t = 0.0;
};
struct XorNet {
  double R = 1.0;
  double beta = 0.2;
};

using AttentionSpec = std::variant<Uniform, SignSym, XorNet>;

// Throws ParameterError for t < 0, R <= 0 or beta outside (0, 1).
void validate_spec(const AttentionSpec& spec);
// Short label such as "uniform", "sign(t=2)" or "xor(R=1,beta=0.2)".
std::string describe(const AttentionSpec& spec);

struct CoefficientRow {
  std::size_t node = 0;
  std::vector<std::uint32_t> neighbors;
  std::vector<double> coefficients;
};

// t if xi*xj >= 0, else -t.
double psi_sign(double xi, double xj, double t);

// Scalar two-layer XOR scoring network in closed piecewise form.
double psi_xor(double xi, double xj, double R, double beta);

// Unnormalized softmax weights exp(psi_ij - max_k psi_ik) for one node, written
// into `weights` (resized to the neighbor count). Returns their sum.
// Uniform and SignSym(0) both produce all-ones weights.
double attention_weights(std::span<const double> features, std::size_t i, std::span<const std::uint32_t> neighbors,
                         const AttentionSpec& spec, std::vector<double>& weights);

// Softmax coefficients c_ij. Throws IsolatedNodeError for an empty neighbor list.
CoefficientRow attention_coefficients(std::span<const double> features, std::size_t i,
                                      std::span<const std::uint32_t> neighbors, const AttentionSpec& spec);

}  // namespace gatsim
