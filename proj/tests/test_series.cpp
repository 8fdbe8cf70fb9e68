#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "betanorm/distribution.hpp"
#include "betanorm/io.hpp"
#include "betanorm/series.hpp"

using namespace betanorm;
using namespace betanorm::series;

namespace {

// Independent oracles from Boost.Math.
double oracle_beta_quantile(double u, double a, double b) { return boost::math::ibeta_inv(a, b, u); }
double oracle_norm_quantile(double u) { return boost::math::quantile(boost::math::normal(), u); }
double oracle_Phi(double z) { return boost::math::cdf(boost::math::normal(), z); }

SeriesCoeffs<double> make(std::vector<double> c) { return SeriesCoeffs<double>(std::move(c), SeriesKind::power_e); }

}  // namespace

TEST(SeriesCoeffs, Invariants) {
  const auto c = make({1.0, 2.0, 3.0});
  EXPECT_EQ(c.order(), 2);
  EXPECT_EQ(c.at(5), 0.0);
  EXPECT_DOUBLE_EQ(c.eval(2.0), 1 + 4 + 12);
  EXPECT_THROW(make({1.0, NAN}), DomainError);
  const auto j = io::to_json(c);
  EXPECT_EQ(j["kind"], "power_e");
  EXPECT_EQ(j["order"], 2);
  EXPECT_EQ(j["coefficients"].size(), 3u);
}

TEST(BetaQuantileA, LeadingCoefficients) {
  for (auto [a, b] : {std::pair{2.0, 3.0}, {0.5, 0.7}, {3.5, 2.5}, {1.0, 4.0}}) {
    const auto c = beta_quantile_a(a, b, 6);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_EQ(c[1], 1.0);
    EXPECT_NEAR(c[2], (b - 1) / (a + 1), 1e-15);
    EXPECT_NEAR(c[3], (b - 1) * (a * a + 3 * b * a - a + 5 * b - 4) / (2 * (a + 1) * (a + 1) * (a + 2)), 1e-14);
  }
}

TEST(BetaQuantileA, TerminatesForBetaOne) {
  const auto c = beta_quantile_a(2.7, 1.0, 30);
  for (int i = 2; i <= 30; ++i) EXPECT_EQ(c[i], 0.0) << i;
  // Q_B(u) = u^{1/alpha} exactly.
  const auto d = beta_quantile_d(2.7, 1.0, 30);
  EXPECT_NEAR(d.eval(std::pow(0.4, 1 / 2.7)), oracle_beta_quantile(0.4, 2.7, 1.0), 1e-14);
}

TEST(BetaQuantileD, Values) {
  EXPECT_NEAR(beta_quantile_d(1.0, 1.0, 5)[1], 1.0, 1e-15);
  const auto d = beta_quantile_d(2.0, 3.0, 40);
  EXPECT_NEAR(d.eval(std::sqrt(0.3)), oracle_beta_quantile(0.3, 2.0, 3.0), 1e-6);
  EXPECT_EQ(d.eval(0.0), 0.0);
  EXPECT_LT(std::abs(d.eval(std::sqrt(1e-12))), 1e-5);
}

TEST(BetaQuantileD, TruncationIsForwardOnly) {
  const auto d20 = beta_quantile_d(0.5, 0.5, 20), d40 = beta_quantile_d(0.5, 0.5, 40);
  for (int i = 0; i <= 20; ++i) EXPECT_EQ(d20[i], d40[i]) << i;
}

TEST(Steinbrecher, Coefficients) {
  const auto b = steinbrecher_b(6);
  EXPECT_EQ(b[0], 1.0);
  EXPECT_NEAR(b[1], 1.0 / 6, 1e-16);
  EXPECT_NEAR(b[2], 7.0 / 120, 1e-16);
  // Third coefficient of the inverse-erf expansion 127/90, rescaled: 127/5040.
  EXPECT_NEAR(b[3], 127.0 / 5040, 1e-16);
  EXPECT_NEAR(b[4], 4369.0 / 362880, 1e-16);
}

TEST(NormalQuantileC, Coefficients) {
  const auto c = normal_quantile_c(41);
  for (int k = 0; k <= 41; k += 2) EXPECT_EQ(c[k], 0.0) << k;
  EXPECT_NEAR(c[1], std::sqrt(2 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(c.eval(0.1), oracle_norm_quantile(0.6), 1e-9);
  EXPECT_NEAR(c.eval(-0.3), oracle_norm_quantile(0.2), 1e-5);
}

TEST(PowerSeriesPow, SmallCases) {
  const auto d = make({-0.5, 1.0, 0.0, 0.0});
  const auto e0 = power_series_pow(d, 0, 3);
  EXPECT_EQ(e0[0], 1.0);
  for (int i = 1; i <= 3; ++i) EXPECT_EQ(e0[i], 0.0);
  const auto e1 = power_series_pow(d, 1, 3);
  for (int i = 0; i <= 3; ++i) EXPECT_EQ(e1[i], d[i]);
  const auto e2 = power_series_pow(d, 2, 3);
  EXPECT_DOUBLE_EQ(e2[0], 0.25);
  EXPECT_DOUBLE_EQ(e2[1], -1.0);
  EXPECT_DOUBLE_EQ(e2[2], 1.0);
  EXPECT_DOUBLE_EQ(e2[3], 0.0);
}

TEST(PowerSeriesPow, ZeroConstantTermNeedsConvolution) {
  const auto d = make({0.0, 1.0, 2.0});
  EXPECT_THROW(power_series_pow(d, 3, 6), DegenerateRecurrenceError);
  const auto e = power_series_pow(d, 3, 6, PowerMethod::convolution);
  // (x + 2x^2)^3 = x^3 + 6x^4 + 12x^5 + 8x^6
  const std::vector<double> want{0, 0, 0, 1, 6, 12, 8};
  for (int i = 0; i <= 6; ++i) EXPECT_DOUBLE_EQ(e[i], want[i]) << i;
}

TEST(PowerSeriesPow, RecurrenceMatchesConvolutionOnRandomSeries) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> c(9);
    for (auto& x : c) x = u(gen);
    c[0] = 0.5 + std::abs(c[0]);
    const auto d = make(c);
    for (int k : {2, 3, 5}) {
      const auto miller = power_series_pow(d, k, 8);
      const auto conv = power_series_pow(d, k, 8, PowerMethod::convolution);
      const auto next = convolve(miller, d, 8);
      const auto direct = power_series_pow(d, k + 1, 8);
      for (int i = 0; i <= 8; ++i) {
        EXPECT_NEAR(miller[i], conv[i], 1e-10 * (1 + std::abs(conv[i])));
        EXPECT_NEAR(next[i], direct[i], 1e-10 * (1 + std::abs(direct[i])));
      }
    }
  }
}

TEST(ComposeQuantile, NormalSubModel) {
  // For (1,1) the d-series is u - 1/2, so with N = K the composition is the
  // K-term Taylor polynomial of the normal quantile about 1/2. The expansion
  // in powers of u cancels heavily, so the identities are checked in extended
  // precision.
  using T = Real100;
  const auto f = compose_quantile_f<T>(T(1), T(1), 41, 41);
  EXPECT_LT(abs(f.eval(T(0.5))), 1e-25);
  EXPECT_NEAR(static_cast<double>(f.eval(T(0.3))), oracle_norm_quantile(0.3), 1e-7);
  // Truncating at N = K - 1 drops exactly the c_K u^K term.
  const auto c = normal_quantile_c<T>(41);
  const auto g = compose_quantile_f<T>(T(1), T(1), 40, 41);
  EXPECT_LT(abs(g.eval(T(0.5)) + c[41] * pow(T(0.5), 41)), 1e-25);
  // In double precision the same polynomial keeps about 1e-7.
  EXPECT_NEAR(compose_quantile_f(1.0, 1.0, 41, 41).eval(0.5), 0.0, 1e-6);
}

TEST(ComposeQuantile, MatchesComposedOracle) {
  const auto f = compose_quantile_f(2.0, 3.0, 40, 41);
  const double want = oracle_norm_quantile(oracle_beta_quantile(0.3, 2.0, 3.0));
  EXPECT_NEAR(f.eval(std::sqrt(0.3)), want, 1e-5);
  // Left tail: values fall with u and keep the oracle's sign.
  double prev = f.eval(std::sqrt(0.05));
  for (double u : {0.02, 0.01, 0.005, 0.002, 0.001}) {
    const double v = f.eval(std::sqrt(u));
    EXPECT_LT(v, prev) << u;
    EXPECT_LT(v, 0.0);
    prev = v;
  }
}

double composed_error(double a, double b, int N, int K, double u_max) {
  const auto f = compose_quantile_f(a, b, N, K);
  double worst = 0.0;
  for (double u = 0.05; u <= u_max + 1e-12; u += 0.01) {
    const double want = oracle_norm_quantile(oracle_beta_quantile(u, a, b));
    worst = std::max(worst, std::abs(f.eval(std::pow(u, 1 / a)) - want));
  }
  return worst;
}

TEST(ComposeQuantile, ErrorShrinksWithTruncation) {
  // Convergence table against the composed oracle. The (1,1) case is the
  // normal quantile's own Taylor polynomial, slow near the ends of (0, 1).
  struct Case {
    double a, b, u_max, final_tol;
  };
  for (auto [a, b, u_max, tol] : {Case{2.0, 3.0, 0.5, 1e-5}, Case{3.5, 2.5, 0.5, 1e-4}, Case{1.0, 1.0, 0.3, 1e-3}}) {
    double previous = INFINITY;
    for (int n : {11, 21, 41}) {
      const double worst = composed_error(a, b, n, n, u_max);
      EXPECT_LT(worst, previous) << a << " " << b << " n=" << n;
      previous = worst;
    }
    EXPECT_LT(previous, tol) << a << " " << b;
  }
}

TEST(ComposeQuantile, DivergesWhenTheBetaSeriesIsTooWide) {
  // For small shapes the d-series majorant exceeds the radius 1/2 of the
  // normal quantile expansion near the median and the composition diverges.
  const double e21 = composed_error(0.5, 0.5, 21, 21, 0.5);
  const double e41 = composed_error(0.5, 0.5, 41, 41, 0.5);
  EXPECT_GT(e21, 1.0);
  EXPECT_GT(e41, e21);
}

TEST(ComposeQuantile, RejectsEvenK) { EXPECT_THROW(compose_quantile_f(2.0, 3.0, 10, 10), DomainError); }

TEST(MomentG, FirstPowerIsIdentity) {
  // An algebraic identity of the recurrence; in double its rounding grows
  // with the index, so it is checked in extended precision.
  using T = Real100;
  const auto f = compose_quantile_f<T>(T(2), T(3), 20, 21);
  const auto g = moment_g(f, 1, 20);
  for (int i = 0; i <= 20; ++i) EXPECT_LT(abs(g[i] - f[i]), 1e-25 * (1 + abs(f[i]))) << i;
  EXPECT_THROW(moment_g(f, 0, 20), DomainError);
}

TEST(MomentG, NormalSecondMomentConvergesInK) {
  // The (1,1) quantile series is a polynomial of degree K in u, so the
  // moment sum is exact for N >= 2K; its error decays slowly with K. The
  // square is formed by convolution: the recurrence divides by f_0 while f
  // vanishes at u = 1/2, which is unstable at this length.
  using T = Real100;
  double previous = INFINITY;
  for (int K : {21, 41, 81}) {
    const auto f = compose_quantile_f<T>(T(1), T(1), K, K);
    const auto g = moment_g(f, 2, 2 * K, PowerMethod::convolution);
    const double err = std::abs(static_cast<double>(moment_from_g(g, T(1))) - 1.0);
    EXPECT_LT(err, previous) << K;
    previous = err;
  }
  EXPECT_LT(previous, 0.03);
}

TEST(MomentG, MeanOfTwoThreeNearQuadrature) {
  MomentReport quad = moment(BnParams(2, 3), 1, MomentMethod::quadrature);
  MomentReport ser = moment(BnParams(2, 3), 1, MomentMethod::quantile_series);
  EXPECT_NEAR(ser.value, quad.value, 5e-4);
  EXPECT_LT(std::abs(ser.value - quad.value), 2.0 * ser.est_error);
}

TEST(PhiPowerSeries, Coefficients) {
  const auto a = phi_power_series(25);
  EXPECT_EQ(a[0], 0.5);
  EXPECT_NEAR(a[1], 1 / std::sqrt(2 * std::numbers::pi), 1e-16);
  EXPECT_EQ(a[2], 0.0);
  EXPECT_NEAR(a.eval(1.0), oracle_Phi(1.0), 1e-10);
}

TEST(PhiPowerC, SquareOfPhi) {
  const auto c = phi_power_c(2, 30);
  for (double x : {-1.0, 0.3, 1.2}) EXPECT_NEAR(c.eval(x), std::pow(oracle_Phi(x), 2), 1e-9) << x;
  const auto conv = phi_power_c(3, 30, PowerMethod::convolution);
  const auto rec = phi_power_c(3, 30);
  for (int i = 0; i <= 30; ++i) EXPECT_NEAR(conv[i], rec[i], 1e-14);
}

TEST(BinomWeightsNu, Values) {
  const auto one = binom_weights_nu(2.5, 1.0, 5);
  EXPECT_NEAR(one[0], 1 / boost::math::beta(2.5, 1.0), 1e-14);
  for (int k = 1; k <= 5; ++k) EXPECT_EQ(one[k], 0.0);
  const auto two = binom_weights_nu(2.5, 2.0, 5);
  const double inv = 1 / boost::math::beta(2.5, 2.0);
  EXPECT_NEAR(two[0], inv, 1e-14);
  EXPECT_NEAR(two[1], -inv, 1e-14);
  for (int k = 2; k <= 5; ++k) EXPECT_EQ(two[k], 0.0);
  // Normalization: sum nu_k int phi Phi^{k + alpha - 1} = sum nu_k / (k + alpha) = 1.
  const auto nu = binom_weights_nu(1.7, 4.0, 10);
  double total = 0.0;
  for (int k = 0; k <= 10; ++k) total += nu[k] / (k + 1.7);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PowerReexpandS, ExactPowers) {
  for (int n = 0; n <= 5; ++n) {
    const auto s = power_reexpand_s(double(n), 6, 10);
    for (int r = 0; r <= 6; ++r) EXPECT_NEAR(s[r], r == n ? 1.0 : 0.0, 1e-12) << n << " " << r;
  }
  const auto one = power_reexpand_s(1.0, 4, 4);
  EXPECT_NEAR(one[1], 1.0, 1e-15);
  EXPECT_THROW(power_reexpand_s(0.5, 8, 4), DomainError);
}

TEST(PowerReexpandS, FractionalPower) {
  // With the inner sum cut at J = R the re-expansion is the degree-R Taylor
  // polynomial of Phi^delta about Phi = 1.
  const double P = oracle_Phi(1.0);
  const auto s = power_reexpand_s(0.5, 8, 8);
  EXPECT_NEAR(s.eval(P), std::sqrt(P), 1e-3);
  EXPECT_NEAR(s.eval(P), std::sqrt(P), 1e-8);
}

TEST(PowerReexpandS, ClosedFormMatchesAlternatingSum) {
  for (double delta : {0.3, 1.5, 2.7})
    for (int J : {4, 8, 12}) {
      const auto s = power_reexpand_s(delta, 4, J);
      for (int r = 0; r <= 4; ++r)
        EXPECT_NEAR(s[r], power_reexpand_s_direct(delta, r, J), 1e-9 * (1 + std::abs(s[r])));
    }
}

TEST(WeightsPi, IntegerShapesCollapse) {
  // (alpha, beta) = (2, 2): density weight Phi (1 - Phi) / B = 6 Phi - 6 Phi^2.
  const auto pi = weights_pi(2.0, 2.0, 4, 4, 3);
  EXPECT_NEAR(pi[0], 0.0, 1e-12);
  EXPECT_NEAR(pi[1], 6.0, 1e-12);
  EXPECT_NEAR(pi[2], -6.0, 1e-12);
  EXPECT_NEAR(pi[3], 0.0, 1e-12);
}

TEST(GaussianMomentIntegrals, MatchClosedForms) {
  const double t = 0.7, root = std::sqrt(2 * std::numbers::pi), e = std::exp(t * t / 2);
  const auto J = gaussian_moment_integrals(t, 4);
  EXPECT_NEAR(J[0], root * e, 1e-13);
  EXPECT_NEAR(J[1], -root * e * t, 1e-13);
  EXPECT_NEAR(J[2], root * e * (t * t + 1), 1e-13);
  EXPECT_NEAR(J[3], -root * e * (t * t * t + 3 * t), 1e-12);
  EXPECT_NEAR(J[4], root * e * (t * t * t * t + 6 * t * t + 3), 1e-12);
}
