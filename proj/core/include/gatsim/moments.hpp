#pragma once

#include <cstddef>
#include <cstdint>

namespace gatsim {

// P{Z >= s} for a standard normal Z.
double normal_upper_tail(double s);
// log P{Z >= s}, finite and accurate for s well beyond the underflow point of
// erfc (a continued fraction for the Mills ratio takes over for s >= 5).
double log_normal_upper_tail(double s);

// Half-line moments of one normal density f:
// pos1 = int_0^inf x f, neg1 = int_-inf^0 x f, pos2 = int_0^inf x^2 f, neg2 = int_-inf^0 x^2 f.
struct HalfLineMoments {
  double pos1 = 0.0;
  double neg1 = 0.0;
  double pos2 = 0.0;
  double neg2 = 0.0;
};

struct TruncatedMoments {
  HalfLineMoments plus;   // N(mu, sigma^2)
  HalfLineMoments minus;  // N(-mu, sigma^2)
};

TruncatedMoments truncated_moments(double mu, double sigma);

// y = sigma/sqrt(2 pi) exp(-mu^2/2sigma^2), z = P{Z >= mu/sigma},
// A(z,t) = e^t (y + mu(1-z)) + e^-t (-y + mu z),
// B(z,t) = e^2t (mu y + (mu^2+sigma^2)(1-z)) + e^-2t (-mu y + (mu^2+sigma^2) z) - A(z,t)^2.
struct TailScalars {
  double y = 0.0;
  double z = 0.0;
  double A_plus = 0.0;
  double A_minus = 0.0;
  double B_plus = 0.0;
  double B_minus = 0.0;
};

TailScalars tail_scalars(double mu, double sigma, double t);

struct MomentInputs {
  double mu = 1.0;
  double sigma = 1.0;
  double t = 0.0;
  std::size_t deg_p = 0;
  std::size_t deg_q = 0;

  // Throws ParameterError: mu must be finite and >= 0, sigma > 0, t >= 0,
  // deg_p + deg_q >= 1.
  void validate() const;
};

struct MomentPair {
  double mu_prime = 0.0;
  double var_prime = 0.0;
};

// log of sum_{r<=n} sum_{s<=m} C(n,r) C(m,s) (1-x)^(m-s+r) x^(n+s-r) / ((r+s)e^t + (n+m-r-s)e^-t)^k,
// with x given through log x and log(1-x). Terms are formed in log space and
// combined by a streaming log-sum-exp.
double log_attention_sum(double log_x, double log_1mx, double t, std::size_t n, std::size_t m, int k);

// Every intermediate of the closed form for one node.
struct ClosedFormDetail {
  TailScalars scalars;
  double S = 0.0;
  double T = 0.0;
  double S_hat = 0.0;
  double T_hat = 0.0;
  double mean = 0.0;      // S * T
  double variance = 0.0;  // S_hat * T_hat, unclamped
};

ClosedFormDetail closed_form_detail(const MomentInputs& inputs);

// mu' = S * T.
double closed_form_mean(const MomentInputs& inputs);
// sigma'^2 = S_hat * T_hat. Values in [-1e-9, 0) are clamped to 0 with a
// logged residual; anything lower throws NumericalConsistencyError.
double closed_form_var(const MomentInputs& inputs);

enum class CorollaryCase { ZeroT, HighSnr, LowSnr };

// ZeroT: ((p-q)/(p+q) mu, sigma^2/(n(p+q))).
// HighSnr: ((p e^t - q e^-t)/(p e^t + q e^-t) mu, 2 (p e^2t + q e^-2t) sigma^2 / (n (p e^t + q e^-t)^2)),
//   i.e. the realized-degree variance with |N_i| = n(p+q)/2.
// LowSnr: order-of-magnitude form with unit constants,
//   ((p-q)/(p+q) mu, ((e^t - e^-t)^2 + 1/(n(p+q))) sigma^2).
MomentPair corollary_case(double p, double q, double mu, double sigma, double t, std::size_t n, CorollaryCase which);

// The alternative high-SNR variance sigma^2/(n(p+q)); differs from the
// HighSnr case above by the |N_i| versus n(p+q) convention.
double high_snr_variance_short_form(double p, double q, double sigma, std::size_t n);

// delta(t) = sqrt((p e^t - q e^-t)^2 / (p e^2t + q e^-2t)), evaluated without overflow.
double snr_gain_delta(double p, double q, double t);
// sqrt(n) * delta(t).
double snr_gain(double p, double q, double t, std::size_t n);

struct SequenceDiagnostics {
  double gamma = 0.0;       // Gamma(n, m; k)
  double lower = 0.0;       // e^-kt (n+m)^-k
  double upper = 0.0;       // e^kt (n+m)^-k
  double A = 0.0;           // Gamma(n, m; 2)
  double B = 0.0;           // Gamma(n, m; 1)^2
  double scaled_gap = 0.0;  // (n+m)^3 |A - B|
  double gap_bound = 0.0;   // e^6t x(1-x)
};

SequenceDiagnostics sequence_diagnostics(double x, double t, std::size_t n, std::size_t m, int k);

struct MonteCarloMoments {
  double mean = 0.0;
  double mean_se = 0.0;
  double var = 0.0;
  double var_se = 0.0;
  std::size_t trials = 0;
};

// Simulates independent neighborhoods of one node: the center feature and its
// deg_p same-class neighbors come from the center's class distribution, the
// deg_q others from the opposite one. Each trial aggregates with SignSym(t)
// attention. center_class 1 means N(mu, sigma^2) centers, 0 means N(-mu, sigma^2).
// Requires trials >= 1000. Output does not depend on `workers`.
MonteCarloMoments monte_carlo_moments(const MomentInputs& inputs, std::size_t trials, std::uint64_t seed,
                                      int center_class = 1, unsigned workers = 0);

// Exact finite-degree mean and variance of the same aggregate, obtained by
// conditioning on the center's sign and summing over the number of neighbors
// whose sign agrees with it. Used to cross-check the Monte Carlo simulator.
MomentPair exact_moments(const MomentInputs& inputs);

}  // namespace gatsim
