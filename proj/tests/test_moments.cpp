#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "gatsim/error.hpp"
#include "gatsim/log.hpp"
#include "gatsim/moments.hpp"
#include "gatsim/rng.hpp"
#include "oracles.hpp"

using namespace gatsim;

namespace {

using oracle::half_line;

// log P{Z >= s} = -s^2/2 - log sqrt(2 pi) + log int_0^inf exp(-s u - u^2/2) du.
double log_tail_by_quadrature(double s) {
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate([&](double u) { return std::exp(-s * u - 0.5 * u * u); }, 0.0,
                                               std::numeric_limits<double>::infinity());
  return -0.5 * s * s - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(integral);
}

// Mean of the SignSym(t) aggregate when all P neighbors share the center's
// class. Conditions on the center sign; K ~ Bin(P - 1, agree) counts the
// other neighbors on the center's side. Half-line moments come from quadrature.
double all_intra_mean(double mu, double sigma, double t, int P) {
  const double pos1 = half_line(mu, sigma, 1, true);
  const double neg1 = half_line(mu, sigma, 1, false);
  const double p_pos = 0.5 * std::erfc(-mu / (sigma * std::sqrt(2.0)));
  double total = 0.0;
  for (int center_pos = 0; center_pos < 2; ++center_pos) {
    const double p_center = center_pos ? p_pos : 1.0 - p_pos;
    const double agree_prob = center_pos ? p_pos : 1.0 - p_pos;
    const double m_agree = center_pos ? pos1 : neg1;
    const double m_dis = center_pos ? neg1 : pos1;
    double e_agree = 0.0, e_dis = 0.0;
    if (P == 1) {
      e_agree = 1.0 / std::exp(t);
      e_dis = 1.0 / std::exp(-t);
    } else {
      boost::math::binomial_distribution<double> bin(P - 1, agree_prob);
      for (int K = 0; K <= P - 1; ++K) {
        const double pk = boost::math::pdf(bin, K);
        e_agree += pk / ((K + 1) * std::exp(t) + (P - K - 1) * std::exp(-t));
        e_dis += pk / (K * std::exp(t) + (P - K) * std::exp(-t));
      }
    }
    total += p_center * P * (std::exp(t) * m_agree * e_agree + std::exp(-t) * m_dis * e_dis);
  }
  return total;
}

}  // namespace

TEST(NormalTail, ZeroIsHalf) { EXPECT_EQ(normal_upper_tail(0.0), 0.5); }

TEST(NormalTail, RespectsTailBoundAtThree) {
  const double bound = std::min(0.5 * std::exp(-4.5), std::exp(-4.5) / (3.0 * std::sqrt(2.0 * std::numbers::pi)));
  EXPECT_LE(normal_upper_tail(3.0), bound);
  for (double s : {0.5, 1.0, 2.0, 5.0, 8.0}) {
    const double b = std::min(0.5 * std::exp(-s * s / 2), std::exp(-s * s / 2) / (s * std::sqrt(2.0 * std::numbers::pi)));
    EXPECT_LE(normal_upper_tail(s), b) << s;
  }
}

TEST(NormalTail, TenMatchesQuadratureRelative) {
  const double want = std::exp(log_tail_by_quadrature(10.0));
  EXPECT_NEAR(normal_upper_tail(10.0), want, 1e-12 * want);
  EXPECT_NEAR(std::exp(log_normal_upper_tail(10.0)), want, 1e-12 * want);
}

TEST(NormalTail, LogFormAccurateToForty) {
  for (double s : {-3.0, 0.0, 1.0, 4.9, 5.0, 5.1, 7.0, 12.0, 20.0, 30.0, 38.0, 40.0}) {
    const double want = s < 0 ? std::log1p(-0.5 * std::erfc(-s / std::numbers::sqrt2)) : log_tail_by_quadrature(s);
    EXPECT_NEAR(log_normal_upper_tail(s), want, 1e-12 * std::max(1.0, std::abs(want))) << "s=" << s;
  }
  EXPECT_TRUE(std::isfinite(log_normal_upper_tail(40.0)));
}

TEST(TruncatedMoments, HalfNormalMeanAtZero) {
  const auto m = truncated_moments(0.0, 2.0);
  EXPECT_NEAR(m.plus.pos1, 2.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
}

TEST(TruncatedMoments, FirstIdentityUsesTailScalars) {
  const auto m = truncated_moments(1.0, 1.0);
  const auto s = tail_scalars(1.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(m.plus.pos1, s.y + 1.0 * (1.0 - s.z));
}

TEST(TruncatedMoments, MatchQuadrature) {
  for (double mu : {0.0, 0.5, 1.0, 3.0})
    for (double sigma : {0.5, 1.0, 2.0}) {
      const auto m = truncated_moments(mu, sigma);
      const double tol = 1e-10;
      EXPECT_NEAR(m.plus.pos1, half_line(mu, sigma, 1, true), tol);
      EXPECT_NEAR(m.plus.neg1, half_line(mu, sigma, 1, false), tol);
      EXPECT_NEAR(m.plus.pos2, half_line(mu, sigma, 2, true), tol);
      EXPECT_NEAR(m.plus.neg2, half_line(mu, sigma, 2, false), tol);
      EXPECT_NEAR(m.minus.pos1, half_line(-mu, sigma, 1, true), tol);
      EXPECT_NEAR(m.minus.neg1, half_line(-mu, sigma, 1, false), tol);
      EXPECT_NEAR(m.minus.pos2, half_line(-mu, sigma, 2, true), tol);
      EXPECT_NEAR(m.minus.neg2, half_line(-mu, sigma, 2, false), tol) << "mu=" << mu << " sigma=" << sigma;
    }
}

TEST(TailScalars, ZeroMeanGivesHalfAndAntisymmetricA) {
  const double t = 0.8;
  const auto s = tail_scalars(0.0, 1.5, t);
  EXPECT_EQ(s.z, 0.5);
  EXPECT_NEAR(s.A_plus, s.y * (std::exp(t) - std::exp(-t)), 1e-15);
  EXPECT_EQ(s.A_minus, -s.A_plus);
}

TEST(TailScalars, ZeroIntensityGivesMeanAndVariance) {
  for (double mu : {0.3, 1.0, 4.0}) {
    const auto s = tail_scalars(mu, 1.7, 0.0);
    EXPECT_NEAR(s.A_plus, mu, 1e-14);
    EXPECT_NEAR(s.B_plus, 1.7 * 1.7, 1e-13);
  }
}

TEST(TailScalars, InvariantsHold) {
  for (double mu : {0.1, 1.0, 3.0, 8.0})
    for (double t : {0.0, 0.5, 2.0, 5.0}) {
      const auto s = tail_scalars(mu, 1.0, t);
      EXPECT_GT(s.z, 0.0);
      EXPECT_LT(s.z, 0.5);
      EXPECT_GT(s.y, 0.0);
      EXPECT_GE(s.B_plus, 0.0);
      EXPECT_GE(s.B_minus, 0.0);
    }
}

TEST(TailScalars, MatchMonteCarloOfWeightedFeature) {
  const double mu = 1.0, sigma = 1.0, t = 1.0;
  const auto s = tail_scalars(mu, sigma, t);
  const CounterRng rng(2024, 77);
  const std::size_t n = 10'000'000;
  for (double tt : {t, -t}) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = mu + sigma * rng.normal(k);
      const double v = std::exp(x >= 0 ? tt : -tt) * x;
      s1 += v;
      s2 += v * v;
    }
    const double mean = s1 / n;
    const double var = s2 / n - mean * mean;
    const double A = tt > 0 ? s.A_plus : s.A_minus;
    const double B = tt > 0 ? s.B_plus : s.B_minus;
    EXPECT_NEAR(mean, A, 4.0 * std::sqrt(var / n));
    // Variance SE from a 1e7 sample, bounded generously by 4 sqrt(2/n) var plus kurtosis slack.
    EXPECT_NEAR(var, B, 4.0 * var * std::sqrt(10.0 / n));
  }
}

TEST(ClosedForm, ZeroIntensityReducesExactly) {
  const CounterRng rng(11, 1);
  for (int k = 0; k < 50; ++k) {
    const double mu = 0.05 + 5.0 * rng.uniform(4 * k);
    const double sigma = 0.1 + 3.0 * rng.uniform(4 * k + 1);
    const auto P = static_cast<std::size_t>(1 + 150 * rng.uniform(4 * k + 2));
    const auto Q = static_cast<std::size_t>(150 * rng.uniform(4 * k + 3));
    const MomentInputs in{mu, sigma, 0.0, P, Q};
    const double N = static_cast<double>(P + Q);
    const double want_mean = (static_cast<double>(P) - static_cast<double>(Q)) / N * mu;
    EXPECT_NEAR(closed_form_mean(in), want_mean, 1e-10 * std::max(std::abs(want_mean), 1e-300)) << k;
    EXPECT_NEAR(closed_form_var(in), sigma * sigma / N, 1e-10 * sigma * sigma / N) << k;
  }
}

TEST(ClosedForm, ZeroMeanGivesZero) {
  for (double t : {0.0, 0.5, 3.0}) EXPECT_EQ(closed_form_mean({0.0, 1.3, t, 12, 7}), 0.0);
}

TEST(ClosedForm, DegenerateDegreesRejected) {
  EXPECT_THROW(closed_form_mean({1.0, 1.0, 1.0, 0, 0}), ParameterError);
  EXPECT_THROW(closed_form_var({1.0, 1.0, 1.0, 0, 0}), ParameterError);
}

TEST(ClosedForm, VanishingNoiseGivesVanishingVariance) {
  for (double t : {0.0, 1.0}) EXPECT_LT(closed_form_var({1.0, 1e-8, t, 10, 5}), 1e-12);
}

TEST(ClosedForm, NegativeVarianceIsNumericalConsistencyError) {
  // At mu/sigma = 1 the printed variance expression goes negative.
  const auto d = closed_form_detail({1.0, 1.0, 0.5, 20, 10});
  ASSERT_LT(d.variance, -1e-9);
  EXPECT_THROW(closed_form_var({1.0, 1.0, 0.5, 20, 10}), NumericalConsistencyError);
}

TEST(ClosedForm, SumsArePositiveAndFiniteAtHighSnr) {
  const auto d = closed_form_detail({30.0, 1.0, 2.0, 300, 200});
  EXPECT_GT(d.S, 0.0);
  EXPECT_GT(d.S_hat, 0.0);
  EXPECT_TRUE(std::isfinite(d.mean));
  EXPECT_TRUE(std::isfinite(d.variance));
}

TEST(ClosedForm, HighSnrMatchesReducedFormWithRealizedDegrees) {
  for (double t : {0.5, 1.0, 2.0}) {
    const std::size_t P = 160, Q = 95;
    const double mu = 20.0;
    const double want = (P * std::exp(t) - Q * std::exp(-t)) / (P * std::exp(t) + Q * std::exp(-t)) * mu;
    EXPECT_NEAR(closed_form_mean({mu, 1.0, t, P, Q}), want, 0.01 * std::abs(want));
  }
}

// The next two cases compare the printed closed form against simulation at a
// moderate SNR. They fail: the formula leaves out the dependence between
// neighbor weights that the shared center sign creates.
TEST(ClosedFormVsSimulation, MeanAtUnitSnr) {
  const MomentInputs in{1.0, 1.0, 1.0, 10, 5};
  const auto mc = monte_carlo_moments(in, 1'000'000, 5);
  EXPECT_NEAR(closed_form_mean(in), mc.mean, 4.0 * mc.mean_se);
}

TEST(ClosedFormVsSimulation, VarianceAtUnitSnr) {
  const MomentInputs in{1.0, 1.0, 1.0, 10, 5};
  const auto mc = monte_carlo_moments(in, 1'000'000, 5);
  EXPECT_NEAR(closed_form_detail(in).variance, mc.var, 4.0 * mc.var_se);
}

TEST(ReducedForms, ZeroTMeanFactor) {
  const auto m = corollary_case(0.3, 0.1, 2.0, 1.0, 0.0, 1000, CorollaryCase::ZeroT);
  EXPECT_DOUBLE_EQ(m.mu_prime, 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(m.var_prime, 1.0 / (1000 * 0.4));
}

TEST(ReducedForms, HighSnrMeanFactorTendsToOne) {
  double prev = 0.0;
  for (double t : {0.0, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    const auto m = corollary_case(0.03, 0.02, 1.0, 1.0, t, 3000, CorollaryCase::HighSnr);
    EXPECT_GE(m.mu_prime, prev);
    prev = m.mu_prime;
  }
  EXPECT_NEAR(prev, 1.0, 1e-12);
}

TEST(ReducedForms, HighSnrVarianceConventions) {
  // At t = 0 the realized-degree form is sigma^2/|N| with |N| = n(p+q)/2,
  // twice the short form.
  const double p = 0.03, q = 0.02, sigma = 2.0;
  const auto m = corollary_case(p, q, 1.0, sigma, 0.0, 3000, CorollaryCase::HighSnr);
  EXPECT_NEAR(m.var_prime, sigma * sigma / (3000 * (p + q) / 2), 1e-15);
  EXPECT_NEAR(m.var_prime, 2.0 * high_snr_variance_short_form(p, q, sigma, 3000), 1e-15);
}

TEST(ReducedForms, LowSnrOrderOfMagnitudeForm) {
  const auto m = corollary_case(0.03, 0.02, 0.1, 1.0, 0.5, 3000, CorollaryCase::LowSnr);
  EXPECT_DOUBLE_EQ(m.mu_prime, 0.2 * 0.1);
  EXPECT_GT(m.var_prime, 0.0);
}

TEST(SnrGain, DeltaIncreasingForPositiveT) {
  const double p = 0.03, q = 0.02;
  double prev = snr_gain_delta(p, q, 0.1);
  for (int k = 2; k <= 100; ++k) {
    const double cur = snr_gain_delta(p, q, 0.1 * k);
    EXPECT_GT(cur, prev) << k;
    prev = cur;
  }
}

TEST(SnrGain, LimitIsSqrtNp) {
  const double p = 0.03, q = 0.02;
  EXPECT_NEAR(snr_gain(p, q, 50.0, 3000), std::sqrt(3000 * p), 1e-12);
  EXPECT_TRUE(std::isfinite(snr_gain(p, q, 700.0, 3000)));
}

TEST(SnrGain, MinimumAtHalfLogRatio) {
  const double p = 0.03, q = 0.02;
  const double t_star = 0.5 * std::log(q / p);
  const double h = 1e-3;
  EXPECT_NEAR(snr_gain_delta(p, q, t_star), 0.0, 1e-12);
  EXPECT_GT(snr_gain_delta(p, q, t_star - h), snr_gain_delta(p, q, t_star));
  EXPECT_GT(snr_gain_delta(p, q, t_star + h), snr_gain_delta(p, q, t_star));
}

TEST(SequenceDiagnostics, GammaBounds) {
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{20, 10}, {100, 50}})
    for (int k : {1, 2}) {
      const auto d = sequence_diagnostics(0.3, 1.0, n, m, k);
      EXPECT_GE(d.gamma, d.lower);
      EXPECT_LE(d.gamma, d.upper);
    }
}

TEST(SequenceDiagnostics, GammaNonIncreasing) {
  for (std::size_t n = 5; n < 60; n += 7) {
    const auto base = sequence_diagnostics(0.3, 1.0, n, 20, 1);
    EXPECT_LE(sequence_diagnostics(0.3, 1.0, n + 1, 20, 1).gamma, base.gamma);
    EXPECT_LE(sequence_diagnostics(0.3, 1.0, n, 21, 1).gamma, base.gamma);
  }
}

TEST(SequenceDiagnostics, ScaledGapBounded) {
  for (double x : {0.1, 0.3, 0.45})
    for (double t : {0.5, 1.0})
      for (std::size_t s : {25, 50, 100, 200}) {
        const auto d = sequence_diagnostics(x, t, s, s, 1);
        EXPECT_LE(d.scaled_gap, d.gap_bound);
      }
}

TEST(SequenceDiagnostics, InputValidation) {
  EXPECT_THROW(sequence_diagnostics(0.0, 1.0, 5, 5, 1), ParameterError);
  EXPECT_THROW(sequence_diagnostics(0.5, 1.0, 5, 5, 1), ParameterError);
  EXPECT_THROW(sequence_diagnostics(0.3, 0.0, 5, 5, 1), ParameterError);
}

TEST(LogAttentionSum, MatchesDirectSumForSmallSizes) {
  const double x = 0.27, t = 0.9;
  for (int k : {1, 2}) {
    const std::size_t n = 6, m = 4;
    double direct = 0.0;
    for (std::size_t r = 0; r <= n; ++r)
      for (std::size_t s = 0; s <= m; ++s) {
        const double c = std::tgamma(n + 1.0) / (std::tgamma(r + 1.0) * std::tgamma(n - r + 1.0)) * std::tgamma(m + 1.0) /
                         (std::tgamma(s + 1.0) * std::tgamma(m - s + 1.0));
        direct += c * std::pow(1 - x, double(m - s + r)) * std::pow(x, double(n + s - r)) /
                  std::pow((r + s) * std::exp(t) + (n + m - r - s) * std::exp(-t), k);
      }
    EXPECT_NEAR(std::exp(log_attention_sum(std::log(x), std::log1p(-x), t, n, m, k)), direct, 1e-14 * direct);
  }
}

TEST(MonteCarlo, RejectsTooFewTrials) { EXPECT_THROW(monte_carlo_moments({1, 1, 1, 3, 2}, 999, 1), ParameterError); }

TEST(MonteCarlo, ZeroIntensityMatchesExactMean) {
  const MomentInputs in{1.5, 2.0, 0.0, 20, 10};
  const auto mc = monte_carlo_moments(in, 200000, 3);
  EXPECT_NEAR(mc.mean, 10.0 / 30.0 * 1.5, 4.0 * mc.mean_se);
  EXPECT_NEAR(mc.var, 4.0 / 30.0, 4.0 * mc.var_se);
}

TEST(MonteCarlo, AllIntraMatchesTruncatedMomentMixture) {
  for (double t : {0.5, 2.0}) {
    const MomentInputs in{0.8, 1.0, t, 12, 0};
    const auto mc = monte_carlo_moments(in, 200000, 9);
    EXPECT_NEAR(mc.mean, all_intra_mean(0.8, 1.0, t, 12), 4.0 * mc.mean_se) << t;
  }
}

TEST(MonteCarlo, DeterministicAndWorkerIndependent) {
  const MomentInputs in{1.0, 1.0, 1.0, 10, 5};
  const auto a = monte_carlo_moments(in, 20000, 17, 1, 1);
  const auto b = monte_carlo_moments(in, 20000, 17, 1, 1);
  const auto c = monte_carlo_moments(in, 20000, 17, 1, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.var, b.var);
  EXPECT_EQ(a.mean, c.mean);
  EXPECT_EQ(a.var_se, c.var_se);
}

TEST(MonteCarlo, ClassZeroCentersNegateMean) {
  const MomentInputs in{1.0, 1.0, 1.0, 10, 5};
  const auto pos = monte_carlo_moments(in, 20000, 21, 1);
  const auto neg = monte_carlo_moments(in, 20000, 21, 0);
  // Same draws with every mean flipped: the aggregate flips sign exactly.
  EXPECT_NEAR(neg.mean, -pos.mean, 1e-12);
  EXPECT_NEAR(neg.var, pos.var, 1e-12);
}

TEST(ExactMoments, AgreeWithSimulationOnGrid) {
  for (double snr : {0.2, 1.0, 3.0})
    for (double t : {0.0, 0.5, 2.0})
      for (auto [P, Q] : {std::pair<std::size_t, std::size_t>{20, 10}, {7, 0}, {1, 3}}) {
        const MomentInputs in{snr, 1.0, t, P, Q};
        const auto ex = exact_moments(in);
        const auto mc = monte_carlo_moments(in, 100000, 31);
        EXPECT_NEAR(ex.mu_prime, mc.mean, 4.0 * mc.mean_se) << snr << " " << t << " " << P << "," << Q;
        EXPECT_NEAR(ex.var_prime, mc.var, 4.0 * mc.var_se) << snr << " " << t << " " << P << "," << Q;
      }
}

TEST(ExactMoments, ZeroIntensityReduces) {
  const auto ex = exact_moments({1.2, 0.7, 0.0, 13, 4});
  EXPECT_NEAR(ex.mu_prime, 9.0 / 17.0 * 1.2, 1e-12);
  EXPECT_NEAR(ex.var_prime, 0.49 / 17.0, 1e-12);
}
