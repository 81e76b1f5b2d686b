#include "gatsim/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "gatsim/error.hpp"
#include "gatsim/log.hpp"
#include "gatsim/parallel.hpp"
#include "gatsim/rng.hpp"

namespace gatsim {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kVarianceTolerance = 1e-9;

// Mills ratio Q(s)/phi(s) for s >= 5 by backward evaluation of
// 1/(s + 1/(s + 2/(s + 3/(s + ...)))).
double mills_ratio(double s) {
  double v = s;
  for (int k = 200; k >= 1; --k) v = s + k / v;
  return 1.0 / v;
}

double log_binomial(std::size_t n, std::size_t r) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(r) + 1.0) -
         std::lgamma(static_cast<double>(n - r) + 1.0);
}

// log(a e^t + b e^-t) for a, b >= 0 not both zero, without overflow.
double log_weighted_count(double a, double b, double t) {
  if (a == 0.0) return std::log(b) - t;
  if (b == 0.0) return std::log(a) + t;
  return t + std::log(a) + std::log1p((b / a) * std::exp(-2.0 * t));
}

// Binomial(n, p) pmf with p given by its log and the log of its complement.
std::vector<double> binomial_pmf(std::size_t n, double log_p, double log_1mp) {
  std::vector<double> pmf(n + 1);
  for (std::size_t r = 0; r <= n; ++r) {
    const double rr = static_cast<double>(r);
    pmf[r] = std::exp(log_binomial(n, r) + rr * log_p + (static_cast<double>(n) - rr) * log_1mp);
  }
  return pmf;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

double normal_upper_tail(double s) { return 0.5 * std::erfc(s / std::numbers::sqrt2); }

double log_normal_upper_tail(double s) {
  if (std::isnan(s)) return s;
  if (s < 5.0) return std::log(normal_upper_tail(s));
  return -0.5 * s * s + std::log(kInvSqrt2Pi) + std::log(mills_ratio(s));
}

TruncatedMoments truncated_moments(double mu, double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  const double s = mu / sigma;
  const double y = sigma * kInvSqrt2Pi * std::exp(-0.5 * s * s);
  const double z = normal_upper_tail(s);
  const double one_minus_z = normal_upper_tail(-s);
  const double second = mu * mu + sigma * sigma;

  TruncatedMoments m;
  m.plus.pos1 = y + mu * one_minus_z;
  m.plus.neg1 = -y + mu * z;
  m.plus.pos2 = mu * y + second * one_minus_z;
  m.plus.neg2 = -mu * y + second * z;
  m.minus.pos1 = y - mu * z;
  m.minus.neg1 = -y - mu * one_minus_z;
  m.minus.pos2 = -mu * y + second * z;
  m.minus.neg2 = mu * y + second * one_minus_z;
  return m;
}

TailScalars tail_scalars(double mu, double sigma, double t) {
  const auto m = truncated_moments(mu, sigma);
  const double z = normal_upper_tail(mu / sigma);
  TailScalars ts;
  ts.y = sigma * kInvSqrt2Pi * std::exp(-0.5 * (mu / sigma) * (mu / sigma));
  ts.z = z;
  auto A = [&](double tt) { return std::exp(tt) * m.plus.pos1 + std::exp(-tt) * m.plus.neg1; };
  auto B = [&](double tt) {
    const double a = A(tt);
    return std::exp(2.0 * tt) * m.plus.pos2 + std::exp(-2.0 * tt) * m.plus.neg2 - a * a;
  };
  ts.A_plus = A(t);
  ts.A_minus = A(-t);
  ts.B_plus = B(t);
  ts.B_minus = B(-t);
  return ts;
}

void MomentInputs::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be finite and >= 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be finite and > 0");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("t must be finite and >= 0");
  if (deg_p + deg_q == 0) throw ParameterError("deg_p + deg_q must be at least 1");
}

double log_attention_sum(double log_x, double log_1mx, double t, std::size_t n, std::size_t m, int k) {
  const std::size_t total = n + m;
  std::vector<double> lb_n(n + 1), lb_m(m + 1), log_den(total + 1);
  for (std::size_t r = 0; r <= n; ++r) lb_n[r] = log_binomial(n, r);
  for (std::size_t s = 0; s <= m; ++s) lb_m[s] = log_binomial(m, s);
  for (std::size_t a = 0; a <= total; ++a)
    log_den[a] = log_weighted_count(static_cast<double>(a), static_cast<double>(total - a), t);

  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  double top = -std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (std::size_t r = 0; r <= n; ++r) {
    const double dr = static_cast<double>(r);
    for (std::size_t s = 0; s <= m; ++s) {
      const double ds = static_cast<double>(s);
      const double term = lb_n[r] + lb_m[s] + (dm - ds + dr) * log_1mx + (dn + ds - dr) * log_x -
                          static_cast<double>(k) * log_den[r + s];
      if (term > top) {
        acc = acc * std::exp(top - term) + 1.0;
        top = term;
      } else {
        acc += std::exp(term - top);
      }
    }
  }
  return top + std::log(acc);
}

ClosedFormDetail closed_form_detail(const MomentInputs& inputs) {
  inputs.validate();
  const double mu = inputs.mu;
  const double sigma = inputs.sigma;
  const double t = inputs.t;
  const double P = static_cast<double>(inputs.deg_p);
  const double Q = static_cast<double>(inputs.deg_q);

  ClosedFormDetail d;
  d.scalars = tail_scalars(mu, sigma, t);
  const auto& sc = d.scalars;
  const double z = sc.z;
  const double w = 1.0 - z;
  const double log_z = log_normal_upper_tail(mu / sigma);
  const double log_w = log_normal_upper_tail(-mu / sigma);

  d.S = std::exp(log_attention_sum(log_z, log_w, t, inputs.deg_p, inputs.deg_q, 1));
  d.S_hat = std::exp(log_attention_sum(log_z, log_w, t, inputs.deg_p, inputs.deg_q, 2));

  const double same = w * sc.A_plus + z * sc.A_minus;
  const double cross = w * sc.A_minus + z * sc.A_plus;
  d.T = P * same - Q * cross;

  const double spread = std::exp(t) - std::exp(-t);
  const double jump = 2.0 * sc.y + mu * (1.0 - 2.0 * z);
  const double term_sq = (P * P + Q * Q) * spread * spread * z * w * jump * jump;
  const double term_cross = 2.0 * P * Q * spread * (-2.0 * w * sc.y + mu * z * (1.0 - 2.0 * z)) * same;
  const double term_p = P * (w * sc.B_plus + z * sc.B_minus);
  const double term_q = Q * (w * sc.B_minus + z * sc.B_plus);
  d.T_hat = term_sq + term_cross + term_p + term_q;

  d.mean = d.S * d.T;
  d.variance = d.S_hat * d.T_hat;
  return d;
}

double closed_form_mean(const MomentInputs& inputs) { return closed_form_detail(inputs).mean; }

double closed_form_var(const MomentInputs& inputs) {
  const double v = closed_form_detail(inputs).variance;
  if (v >= 0.0) return v;
  std::ostringstream msg;
  msg.precision(6);
  msg << "closed-form variance " << v << " at mu=" << inputs.mu << " sigma=" << inputs.sigma << " t=" << inputs.t
      << " deg_p=" << inputs.deg_p << " deg_q=" << inputs.deg_q;
  if (v < -kVarianceTolerance) throw NumericalConsistencyError(msg.str() + " is negative");
  log_warning(msg.str() + " clamped to 0");
  return 0.0;
}

MomentPair corollary_case(double p, double q, double mu, double sigma, double t, std::size_t n, CorollaryCase which) {
  const double nn = static_cast<double>(n);
  const double structural = (p - q) / (p + q);
  switch (which) {
    case CorollaryCase::ZeroT:
      return {structural * mu, sigma * sigma / (nn * (p + q))};
    case CorollaryCase::HighSnr: {
      const double up = p * std::exp(t) + q * std::exp(-t);
      const double mean = (p * std::exp(t) - q * std::exp(-t)) / up * mu;
      const double var = 2.0 * (p * std::exp(2.0 * t) + q * std::exp(-2.0 * t)) * sigma * sigma / (nn * up * up);
      return {mean, var};
    }
    case CorollaryCase::LowSnr: {
      const double spread = std::exp(t) - std::exp(-t);
      return {structural * mu, (spread * spread + 1.0 / (nn * (p + q))) * sigma * sigma};
    }
  }
  throw ParameterError("unknown corollary case");
}

double high_snr_variance_short_form(double p, double q, double sigma, std::size_t n) {
  return sigma * sigma / (static_cast<double>(n) * (p + q));
}

double snr_gain_delta(double p, double q, double t) {
  // Divide numerator and denominator by e^2t so large t cannot overflow.
  const double e2 = std::exp(-2.0 * t);
  const double num = p - q * e2;
  return std::sqrt(num * num / (p + q * e2 * e2));
}

double snr_gain(double p, double q, double t, std::size_t n) {
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) throw ParameterError("p and q must lie in (0, 1]");
  if (!(t >= 0.0)) throw ParameterError("t must be >= 0");
  return std::sqrt(static_cast<double>(n)) * snr_gain_delta(p, q, t);
}

SequenceDiagnostics sequence_diagnostics(double x, double t, std::size_t n, std::size_t m, int k) {
  if (!(x > 0.0 && x < 0.5)) throw ParameterError("x must lie in (0, 1/2)");
  if (!(t > 0.0)) throw ParameterError("t must be > 0");
  if (n + m == 0) throw ParameterError("n + m must be at least 1");
  if (k < 1) throw ParameterError("k must be at least 1");
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  const double size = static_cast<double>(n + m);

  SequenceDiagnostics d;
  d.gamma = std::exp(log_attention_sum(lx, l1x, t, n, m, k));
  d.lower = std::exp(-k * t - k * std::log(size));
  d.upper = std::exp(k * t - k * std::log(size));
  d.A = std::exp(log_attention_sum(lx, l1x, t, n, m, 2));
  const double g1 = std::exp(log_attention_sum(lx, l1x, t, n, m, 1));
  d.B = g1 * g1;
  d.scaled_gap = size * size * size * std::abs(d.A - d.B);
  d.gap_bound = std::exp(6.0 * t) * x * (1.0 - x);
  return d;
}

MonteCarloMoments monte_carlo_moments(const MomentInputs& inputs, std::size_t trials, std::uint64_t seed,
                                      int center_class, unsigned workers) {
  inputs.validate();
  if (trials < 1000) throw ParameterError("monte_carlo_moments needs at least 1000 trials");
  if (center_class != 0 && center_class != 1) throw ParameterError("center_class must be 0 or 1");

  const std::size_t P = inputs.deg_p;
  const std::size_t N = inputs.deg_p + inputs.deg_q;
  const double sign = center_class == 1 ? 1.0 : -1.0;
  const double mu = inputs.mu;
  const double sigma = inputs.sigma;
  const double low = std::exp(-2.0 * inputs.t);
  const CounterRng rng(seed, stream::kMonteCarlo);

  std::vector<double> samples(trials);
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (trials + kChunk - 1) / kChunk;
  parallel_for(
      chunks,
      [&](std::size_t c) {
        std::vector<double> x(N);
        const std::size_t end = std::min(trials, (c + 1) * kChunk);
        for (std::size_t trial = c * kChunk; trial < end; ++trial) {
          const std::uint64_t base = static_cast<std::uint64_t>(trial) * (N + 1);
          const double xi = sign * (mu + sigma * rng.normal(base + N));
          bool any_agree = false;
          for (std::size_t j = 0; j < N; ++j) {
            // Class-0 centers mirror the whole draw, noise included.
            x[j] = sign * ((j < P ? mu : -mu) + sigma * rng.normal(base + j));
            any_agree = any_agree || xi * x[j] >= 0.0;
          }
          const double lo = any_agree ? low : 1.0;
          double num = 0.0;
          double den = 0.0;
          for (std::size_t j = 0; j < N; ++j) {
            const double wgt = xi * x[j] >= 0.0 ? 1.0 : lo;
            num += wgt * x[j];
            den += wgt;
          }
          samples[trial] = num / den;
        }
      },
      workers);

  const double nt = static_cast<double>(trials);
  double sum = 0.0;
  for (double v : samples) sum += v;
  const double mean = sum / nt;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : samples) {
    const double d2 = (v - mean) * (v - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  MonteCarloMoments out;
  out.trials = trials;
  out.mean = mean;
  out.var = m2 / (nt - 1.0);
  out.mean_se = std::sqrt(out.var / nt);
  const double pop_var = m2 / nt;
  out.var_se = std::sqrt(std::max(0.0, m4 / nt - pop_var * pop_var) / nt);
  return out;
}

MomentPair exact_moments(const MomentInputs& inputs) {
  inputs.validate();
  const std::size_t P = inputs.deg_p;
  const std::size_t Q = inputs.deg_q;
  const double N = static_cast<double>(P + Q);
  const double t = inputs.t;
  const double et = std::exp(t);
  const double emt = std::exp(-t);
  const auto tm = truncated_moments(inputs.mu, inputs.sigma);
  const double log_z = log_normal_upper_tail(inputs.mu / inputs.sigma);
  const double log_w = log_normal_upper_tail(-inputs.mu / inputs.sigma);

  // First and second moments restricted to one half line, plus the log of the
  // half line's probability.
  struct Part {
    double m1, m2, log_prob;
  };
  const Part intra_pos{tm.plus.pos1, tm.plus.pos2, log_w};
  const Part intra_neg{tm.plus.neg1, tm.plus.neg2, log_z};
  const Part inter_pos{tm.minus.pos1, tm.minus.pos2, log_z};
  const Part inter_neg{tm.minus.neg1, tm.minus.neg2, log_w};

  double mean = 0.0;
  double second = 0.0;
  for (int center = 0; center < 2; ++center) {
    // center 0: X_i >= 0 (probability 1 - z); center 1: X_i < 0 (probability z).
    const double prob_center = std::exp(center == 0 ? log_w : log_z);
    const Part& ia = center == 0 ? intra_pos : intra_neg;
    const Part& id = center == 0 ? intra_neg : intra_pos;
    const Part& qa = center == 0 ? inter_pos : inter_neg;
    const Part& qd = center == 0 ? inter_neg : inter_pos;

    // E[1/D(K + shift)^k] where K counts agreeing neighbors among `op` intra
    // and `oq` inter neighbors and D(a) = a e^t + (N - a) e^-t.
    auto expect_inv = [&](std::size_t op, std::size_t oq, int k, std::size_t shift) {
      const auto pmf = convolve(binomial_pmf(op, ia.log_prob, id.log_prob), binomial_pmf(oq, qa.log_prob, qd.log_prob));
      double acc = 0.0;
      for (std::size_t K = 0; K < pmf.size(); ++K) {
        const double a = static_cast<double>(K + shift);
        acc += pmf[K] / std::pow(a * et + (N - a) * emt, k);
      }
      return acc;
    };

    struct Kind {
      std::size_t count;
      const Part* agree;
      const Part* disagree;
      bool intra;
    };
    const Kind kinds[2] = {{P, &ia, &id, true}, {Q, &qa, &qd, false}};

    double e1 = 0.0;
    double e2 = 0.0;
    for (const auto& kind : kinds) {
      if (kind.count == 0) continue;
      const std::size_t op = P - (kind.intra ? 1 : 0);
      const std::size_t oq = Q - (kind.intra ? 0 : 1);
      const double cnt = static_cast<double>(kind.count);
      e1 += cnt * (et * kind.agree->m1 * expect_inv(op, oq, 1, 1) + emt * kind.disagree->m1 * expect_inv(op, oq, 1, 0));
      e2 += cnt * (et * et * kind.agree->m2 * expect_inv(op, oq, 2, 1) +
                   emt * emt * kind.disagree->m2 * expect_inv(op, oq, 2, 0));
    }
    for (const auto& k1 : kinds) {
      for (const auto& k2 : kinds) {
        const bool same = &k1 == &k2;
        if (k1.count == 0 || k2.count == 0 || (same && k1.count < 2)) continue;
        const double pairs = same ? static_cast<double>(k1.count) * static_cast<double>(k1.count - 1)
                                  : static_cast<double>(k1.count) * static_cast<double>(k2.count);
        const std::size_t op = P - (k1.intra ? 1 : 0) - (k2.intra ? 1 : 0);
        const std::size_t oq = Q - (k1.intra ? 0 : 1) - (k2.intra ? 0 : 1);
        const std::pair<double, const Part*> sides1[2] = {{et, k1.agree}, {emt, k1.disagree}};
        const std::pair<double, const Part*> sides2[2] = {{et, k2.agree}, {emt, k2.disagree}};
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            const std::size_t shift = static_cast<std::size_t>((a == 0) + (b == 0));
            e2 += pairs * sides1[a].first * sides2[b].first * sides1[a].second->m1 * sides2[b].second->m1 *
                  expect_inv(op, oq, 2, shift);
          }
      }
    }
    mean += prob_center * e1;
    second += prob_center * e2;
  }
  return {mean, std::max(0.0, second - mean * mean)};
}

}  // namespace gatsim
