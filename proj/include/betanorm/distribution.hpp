#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "betanorm/errors.hpp"
#include "betanorm/quadrature.hpp"
#include "betanorm/series.hpp"
#include "betanorm/specfun.hpp"

// The beta-normal family BN(alpha, beta, mu, sigma): density, distribution
// and quantile functions, sampling, hazard rate, and the moment-type
// functionals, each available through a quadrature oracle and through the
// series representations.
namespace betanorm {

struct BnParams {
  double alpha = 1.0;
  double beta = 1.0;
  double mu = 0.0;
  double sigma = 1.0;

  BnParams() = default;
  BnParams(double a, double b, double m = 0.0, double s = 1.0)
      : alpha(a), beta(b), mu(m), sigma(s) {
    validate();
  }

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw DomainError("BnParams: alpha must be positive and finite");
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw DomainError("BnParams: beta must be positive and finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw DomainError("BnParams: sigma must be positive and finite");
    if (!std::isfinite(mu)) throw DomainError("BnParams: mu must be finite");
  }

  BnParams standardized() const { return BnParams(alpha, beta, 0.0, 1.0); }
  BnParams swapped() const { return BnParams(beta, alpha, -mu, sigma); }
  double log_beta() const { return specfun::log_beta(alpha, beta); }
};

// Truncation and tolerance settings for every series and quadrature route.
struct Settings {
  Quadrature quad{};
  // Composed quantile series Q(u) = sum f_i u^{i/alpha}.
  int series_n = 40;       // terms of the beta-quantile series
  int series_k = 41;       // odd order of the normal-quantile series
  double series_u_max = 0.5;
  // Mean deviations through the incomplete quantile integral.
  int deviation_n = 200;
  int deviation_k = 161;
  // PWM sums: terms of the binomial expansion when it does not terminate.
  int pwm_terms = 400;
  // Generating function.
  double mgf_t_max = 1.0;
  int mgf_s_terms = 20;   // powers of t in the quantile-series route
  int mgf_r_terms = 20;   // powers Phi^r in the Phi-power route
  int mgf_j_terms = 20;   // powers x^j of each Phi^r
  int mgf_nu_terms = 20;  // binomial terms nu_k
  // Shannon entropy 1/n sums.
  int entropy_terms = 200;
};

enum class QuantileMethod { robust, series };
enum class MomentMethod { quadrature, pwm_sum, quantile_series };
enum class MgfMethod { series_quantile, series_phi_power, quadrature };
enum class EntropyMethod { series, quadrature };
enum class DeviationMethod { series, quadrature };
enum class HazardSide { right, left };

inline std::string_view to_string(MomentMethod m) {
  switch (m) {
    case MomentMethod::quadrature: return "quadrature";
    case MomentMethod::pwm_sum: return "pwm_sum";
    case MomentMethod::quantile_series: return "quantile_series";
  }
  return "unknown";
}

inline std::string_view to_string(MgfMethod m) {
  switch (m) {
    case MgfMethod::series_quantile: return "series_quantile";
    case MgfMethod::series_phi_power: return "series_phi_power";
    case MgfMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

struct MomentReport {
  int order = 1;
  MomentMethod method = MomentMethod::quadrature;
  double value = 0.0;
  double est_error = 0.0;
  int truncation = 0;  // quadrature: 0; pwm_sum: binomial terms; quantile_series: K
};

struct HazardAsymptote {
  HazardSide side = HazardSide::right;
  std::function<double(double)> description;
  double slope_or_exponent = 0.0;

  double operator()(double x) const { return description(x); }
};

struct MgfResult {
  double value = 0.0;
  double est_error = 0.0;
};

struct MeanDeviations {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double mean = 0.0;
  double median = 0.0;
  double est_error = 0.0;
};

struct EntropyResult {
  double value = 0.0;
  double est_error = 0.0;
};

// ---------------------------------------------------------------------------
// Density, distribution, quantile

inline double log_pdf(const BnParams& p, double x) {
  if (!std::isfinite(x)) throw DomainError("pdf: x must be finite");
  const double z = (x - p.mu) / p.sigma;
  double lf = specfun::log_phi(z) - std::log(p.sigma) - p.log_beta();
  if (p.alpha != 1.0) lf += (p.alpha - 1.0) * specfun::log_Phi(z);
  if (p.beta != 1.0) lf += (p.beta - 1.0) * specfun::log_Phi_c(z);
  return lf;
}

inline double pdf(const BnParams& p, double x) { return std::exp(log_pdf(p, x)); }

inline specfun::BetaTails cdf_tails(const BnParams& p, double x) {
  if (std::isnan(x)) throw DomainError("cdf: NaN argument");
  const double z = (x - p.mu) / p.sigma;
  return specfun::inc_beta_tails(specfun::Phi(z), specfun::Phi_c(z), p.alpha, p.beta);
}

inline double cdf(const BnParams& p, double x) { return cdf_tails(p, x).lower; }
inline double survival(const BnParams& p, double x) { return cdf_tails(p, x).upper; }

namespace detail {

inline void check_probability(double u, const char* who) {
  if (!(u > 0.0 && u < 1.0))
    throw DomainError(std::string(who) + ": probability must lie in (0, 1)");
}

// Standardized robust quantile, working from the nearer tail.
inline double robust_quantile_z(double alpha, double beta, double u) {
  if (u <= 0.5) return specfun::norm_quantile(specfun::inv_inc_beta(u, alpha, beta));
  return -specfun::norm_quantile(specfun::inv_inc_beta(1.0 - u, beta, alpha));
}

}  // namespace detail

// Coefficients f_i of the standardized quantile series.
inline series::SeriesCoeffs<double> quantile_series_coeffs(const BnParams& p,
                                                           const Settings& cfg = {}) {
  return series::compose_quantile_f(p.alpha, p.beta, cfg.series_n, cfg.series_k);
}

inline double quantile(const BnParams& p, double u, QuantileMethod method = QuantileMethod::robust,
                       const Settings& cfg = {}) {
  detail::check_probability(u, "quantile");
  if (method == QuantileMethod::robust)
    return p.mu + p.sigma * detail::robust_quantile_z(p.alpha, p.beta, u);
  if (u > cfg.series_u_max)
    throw DomainError("quantile: series method is limited to u <= " +
                      std::to_string(cfg.series_u_max) + "; use the robust method");
  const auto f = quantile_series_coeffs(p, cfg);
  return p.mu + p.sigma * f.eval(std::pow(u, 1.0 / p.alpha));
}

// Median by bracketed bisection on the cdf, polished by Newton steps.
inline double median(const BnParams& p) {
  double lo = p.mu - 12.0 * p.sigma, hi = p.mu + 12.0 * p.sigma;
  if (!(cdf(p, lo) < 0.5) || !(cdf(p, hi) > 0.5))
    return quantile(p, 0.5);  // extreme shapes: the median lies outside the window
  for (int it = 0; it < 60 && hi - lo > 1e-6 * p.sigma; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(p, mid) < 0.5 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    const double step = (cdf(p, x) - 0.5) / pdf(p, x);
    const double next = std::clamp(x - step, lo, hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

// n draws by inverse transform of 53-bit uniforms on (0, 1).
inline std::vector<double> sample(const BnParams& p, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
    out.push_back(quantile(p, u));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hazard rate

inline double hazard(const BnParams& p, double x) {
  const double s = survival(p, x);
  if (s < 1e-300)
    throw OverflowError("hazard: survival underflows at x = " + std::to_string(x) +
                        "; use hazard_asymptote for the right tail");
  return std::exp(log_pdf(p, x) - std::log(s));
}

// Closed form of h(mu).
inline double hazard_at_mu(const BnParams& p) {
  const double tail = specfun::inc_beta_tails(0.5, 0.5, p.alpha, p.beta).upper;
  return std::exp((2.0 - p.alpha - p.beta) * std::numbers::ln2 - specfun::kLogSqrt2Pi -
                  std::log(p.sigma) - p.log_beta() - std::log(tail));
}

inline HazardAsymptote hazard_asymptote(const BnParams& p, HazardSide side) {
  if (side == HazardSide::right) {
    const double slope = p.beta / (p.sigma * p.sigma);
    return {side, [slope](double x) { return slope * x; }, slope};
  }
  const double a = p.alpha, mu = p.mu, sigma = p.sigma, lb = p.log_beta();
  auto fn = [=](double x) {
    const double z = (x - mu) / sigma;
    if (!(z < 0.0)) throw DomainError("hazard_asymptote: left form requires x < mu");
    return std::exp((1.0 - a) * std::log(-z) + a * specfun::log_phi(z) - std::log(sigma) - lb);
  };
  return {side, fn, a};
}

// ---------------------------------------------------------------------------
// Moments

namespace detail {

// int of g(z) f_Z(z) over the real line.
template <class G>
Estimate expect_z(const BnParams& p, const G& g, const Quadrature& q) {
  const BnParams z = p.standardized();
  return integrate([&](double x) { return g(x) * pdf(z, x); }, -INFINITY, INFINITY, q);
}

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

inline bool is_integer(double x) { return x == std::floor(x) && x < 1e9; }

// E(X^n) from E(Z^0..n) by the binomial relation; error combined the same way.
inline MomentReport map_to_x(const BnParams& p, int s, const std::vector<double>& ez,
                             const std::vector<double>& err, MomentMethod method, int trunc) {
  double value = 0.0, e = 0.0;
  for (int r = 0; r <= s; ++r) {
    const double w = series::binom(static_cast<double>(s), r) * ipow(p.mu, s - r) * ipow(p.sigma, r);
    value += w * ez[r];
    e += std::abs(w) * err[r];
  }
  return {s, method, value, e, trunc};
}

}  // namespace detail

// Probability weighted moment tau_{s,rho} = int x^s phi(x) Phi(x)^rho dx for
// real rho > -1 (finite since Phi(x) ~ phi(x)/|x| as x -> -inf), by quadrature.
inline Estimate pwm_tau(int s, double rho, const Quadrature& q = {}) {
  if (s < 0 || !(rho > -1.0)) throw DomainError("pwm_tau: need s >= 0 and rho > -1");
  auto g = [s, rho](double x) {
    const double lw = specfun::log_phi(x) + (rho == 0.0 ? 0.0 : rho * specfun::log_Phi(x));
    return detail::ipow(x, s) * std::exp(lw);
  };
  return integrate(g, -INFINITY, INFINITY, q);
}

// Single-sum weight w_i = (-1)^i C(beta - 1, i) / B(alpha, beta).
inline double pwm_weight(double alpha, double beta, int i) {
  return (i % 2 ? -1.0 : 1.0) * series::binom(beta - 1.0, i) *
         std::exp(-specfun::log_beta(alpha, beta));
}

// Triple-sum weight w_{i,j,r} for non-integer alpha.
inline double pwm_weight_triple(double alpha, double beta, int i, int j, int r) {
  return ((i + j + r) % 2 ? -1.0 : 1.0) * series::binom(alpha + i - 1.0, j) *
         series::binom(beta - 1.0, i) * series::binom(static_cast<double>(j), r) *
         std::exp(-specfun::log_beta(alpha, beta));
}

// E(Z^s) by the literal triple sum over i, j <= terms with integer-order PWMs.
// The weights alternate and grow quickly; kept for reference, not used by
// moment().
inline Estimate moment_pwm_triple(double alpha, double beta, int s, int terms,
                                  const Quadrature& q = {}) {
  std::vector<double> tau(static_cast<std::size_t>(terms) + 1);
  double tau_err = 0.0;
  for (int r = 0; r <= terms; ++r) {
    const Estimate e = pwm_tau(s, r, q);
    tau[r] = e.value;
    tau_err = std::max(tau_err, e.error);
  }
  double value = 0.0, weight_mass = 0.0, last = 0.0;
  for (int i = 0; i <= terms; ++i) {
    for (int j = 0; j <= terms; ++j) {
      double inner = 0.0;
      for (int r = 0; r <= j; ++r) {
        const double w = pwm_weight_triple(alpha, beta, i, j, r);
        inner += w * tau[r];
        weight_mass += std::abs(w);
      }
      value += inner;
      if (i == terms || j == terms) last = std::max(last, std::abs(inner));
    }
  }
  return {value, last + weight_mass * tau_err};
}

namespace detail {

// E(Z^s) = (1/B) sum_{i < beta} (-1)^i C(beta-1, i) tau_{s, alpha-1+i} for
// integer beta. Returns the value, an error estimate and the term count.
inline MomentReport pwm_single_sum(double alpha, double beta, int s, const Settings& cfg) {
  const int terms = static_cast<int>(beta) - 1;
  double value = 0.0, err = 0.0;
  for (int i = 0; i <= terms; ++i) {
    const double w = pwm_weight(alpha, beta, i);
    const Estimate tau = pwm_tau(s, alpha - 1.0 + i, cfg.quad);
    value += w * tau.value;
    err += std::abs(w) * tau.error;
  }
  return {s, MomentMethod::pwm_sum, value, err, terms + 1};
}

// Lower half-line PWM tau^-_{s,rho} = int_{-inf}^0 x^s phi(x) Phi(x)^rho dx, rho > -1.
inline Estimate pwm_tau_lower(int s, double rho, const Quadrature& q) {
  auto g = [s, rho](double x) {
    const double lw = specfun::log_phi(x) + (rho == 0.0 ? 0.0 : rho * specfun::log_Phi(x));
    return ipow(x, s) * std::exp(lw);
  };
  return integrate(g, -INFINITY, 0.0, q);
}

// int_{-inf}^0 x^s phi Phi^{a-1} (1-Phi)^{b-1} dx by expanding (1-Phi)^{b-1} in
// powers of Phi <= 1/2, so the terms fall at least geometrically.
inline MomentReport pwm_half_line(double a, double b, int s, const Settings& cfg) {
  double value = 0.0, err = 0.0, last = 0.0;
  int used = 0;
  for (int i = 0; i <= cfg.pwm_terms; ++i) {
    const double w = (i % 2 ? -1.0 : 1.0) * series::binom(b - 1.0, i);
    if (w == 0.0) {  // integer b: the expansion terminates exactly
      last = 0.0;
      break;
    }
    used = i + 1;
    const Estimate tau = pwm_tau_lower(s, a - 1.0 + i, cfg.quad);
    last = w * tau.value;
    value += last;
    err += std::abs(w) * tau.error;
    if (i > 0 && std::abs(last) <= 1e-17 * std::abs(value)) break;
  }
  // Successive PWMs shrink by at least Phi(0) = 1/2, so the remainder is
  // bounded by the last term for |C(b-1, i)| ratios near one.
  return {s, MomentMethod::pwm_sum, value, err + std::abs(last), used};
}

// Standardized moments E(Z^0..smax) by PWM sums. With an integer shape the
// single sum is finite (mirroring with E_{a,b}(Z^s) = (-1)^s E_{b,a}(Z^s) when
// only alpha is an integer); otherwise the integral is split at zero and each
// half expanded in the factor bounded by 1/2.
inline void pwm_moments_z(const BnParams& p, int smax, const Settings& cfg,
                          std::vector<double>& ez, std::vector<double>& err, int& trunc) {
  ez.assign(static_cast<std::size_t>(smax) + 1, 0.0);
  err.assign(static_cast<std::size_t>(smax) + 1, 0.0);
  ez[0] = 1.0;
  trunc = 0;
  const bool finite = is_integer(p.alpha) || is_integer(p.beta);
  const bool mirror = !is_integer(p.beta);
  const double inv_b = std::exp(-p.log_beta());
  for (int s = 1; s <= smax; ++s) {
    if (finite) {
      const double a = mirror ? p.beta : p.alpha;
      const double b = mirror ? p.alpha : p.beta;
      const MomentReport r = pwm_single_sum(a, b, s, cfg);
      ez[s] = (mirror && s % 2) ? -r.value : r.value;
      err[s] = r.est_error;
      trunc = r.truncation;
      continue;
    }
    const MomentReport lo = pwm_half_line(p.alpha, p.beta, s, cfg);
    const MomentReport hi = pwm_half_line(p.beta, p.alpha, s, cfg);
    ez[s] = inv_b * (lo.value + (s % 2 ? -hi.value : hi.value));
    err[s] = inv_b * (lo.est_error + hi.est_error);
    trunc = std::max(lo.truncation, hi.truncation);
  }
}

// --- Quantile-series route, evaluated in extended precision.
//
// The series in u^{1/alpha} is integrated over [0, 1/2] for BN(alpha, beta)
// and, through Q_{alpha,beta}(1 - w) = -Q_{beta,alpha}(w), over [0, 1/2] for
// the mirrored shapes; the two halves give the full integral over [0, 1].
// Powers of the truncated series are formed exactly, so for a given N and K
// the only approximation left is the truncation itself.

using QsReal = series::Real100;
using MgfReal = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<250>>;

// int_0^x F(u)^s du for s = 0..smax, F = sum f_i u^{i/alpha}.
template <class T>
std::vector<T> half_power_integrals(const series::SeriesCoeffs<T>& f, const T& alpha, int smax,
                                    const T& x) {
  const int nf = f.effective_order();
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(smax) + 1);
  std::vector<T> one{T(1)};
  series::SeriesCoeffs<T> g(one, series::SeriesKind::moment_g);
  out.push_back(series::partial_integral(g, alpha, x));
  for (int s = 1; s <= smax; ++s) {
    g = series::convolve(g, f, s * nf, series::SeriesKind::moment_g);
    out.push_back(series::partial_integral(g, alpha, x));
  }
  return out;
}

template <class T>
std::vector<T> quantile_series_moments_t(double alpha, double beta, int smax, int N, int K) {
  const T a(alpha), b(beta), half(0.5);
  const auto lo = half_power_integrals(series::compose_quantile_f(a, b, N, K), a, smax, half);
  const auto hi = half_power_integrals(series::compose_quantile_f(b, a, N, K), b, smax, half);
  std::vector<T> m(static_cast<std::size_t>(smax) + 1);
  for (int s = 0; s <= smax; ++s) m[s] = lo[s] + ((s % 2) ? -hi[s] : hi[s]);
  return m;
}

// E(Z^0..smax) from the quantile series. The error estimate extrapolates
// the change from K-2 to K: if the remainder decays like K^{-p} it equals
// |E_K - E_{K-2}| K / (2p), and the normal quantile series near the ends
// of (0, 1) gives p just below 1, so K |E_K - E_{K-2}| covers p >= 1/2.
inline void quantile_series_moments_z(const BnParams& p, int smax, int N, int K,
                                      std::vector<double>& ez, std::vector<double>& err) {
  const auto m = quantile_series_moments_t<QsReal>(p.alpha, p.beta, smax, N, K);
  const auto m2 = quantile_series_moments_t<QsReal>(p.alpha, p.beta, smax, N, K - 2);
  ez.resize(static_cast<std::size_t>(smax) + 1);
  err.resize(static_cast<std::size_t>(smax) + 1);
  for (int s = 0; s <= smax; ++s) {
    ez[s] = static_cast<double>(m[s]);
    err[s] = static_cast<double>(abs(m[s] - m2[s])) * K;
  }
}

}  // namespace detail

inline MomentReport moment(const BnParams& p, int s, MomentMethod method,
                           const Settings& cfg = {}) {
  if (s < 1) throw DomainError("moment: order must be >= 1");
  switch (method) {
    case MomentMethod::quadrature: {
      const Estimate e = detail::expect_z(
          p, [&](double z) { return detail::ipow(p.mu + p.sigma * z, s); }, cfg.quad);
      return {s, method, e.value, e.error, 0};
    }
    case MomentMethod::pwm_sum: {
      std::vector<double> ez, err;
      int trunc = 0;
      detail::pwm_moments_z(p, s, cfg, ez, err, trunc);
      return detail::map_to_x(p, s, ez, err, method, trunc);
    }
    case MomentMethod::quantile_series: {
      std::vector<double> ez, err;
      detail::quantile_series_moments_z(p, s, cfg.series_n, cfg.series_k, ez, err);
      return detail::map_to_x(p, s, ez, err, method, cfg.series_k);
    }
  }
  throw InternalError("moment: unknown method");
}

namespace detail {

inline double central_moment(const BnParams& p, int k, double mean, const Quadrature& q) {
  return expect_z(p, [&](double z) { return ipow(p.mu + p.sigma * z - mean, k); }, q).value;
}

}  // namespace detail

// Standardized third central moment.
inline double skewness(const BnParams& p, const Settings& cfg = {}) {
  const double m = moment(p, 1, MomentMethod::quadrature, cfg).value;
  const double v = detail::central_moment(p, 2, m, cfg.quad);
  return detail::central_moment(p, 3, m, cfg.quad) / std::pow(v, 1.5);
}

// Standardized fourth central moment (3 for the normal).
inline double kurtosis(const BnParams& p, const Settings& cfg = {}) {
  const double m = moment(p, 1, MomentMethod::quadrature, cfg).value;
  const double v = detail::central_moment(p, 2, m, cfg.quad);
  return detail::central_moment(p, 4, m, cfg.quad) / (v * v);
}

// Bowley skewness from the quartiles.
inline double bowley(const BnParams& p) {
  const double q1 = quantile(p, 0.25), q2 = quantile(p, 0.5), q3 = quantile(p, 0.75);
  return (q3 + q1 - 2.0 * q2) / (q3 - q1);
}

// Moors kurtosis from the octiles, as the plain ratio (about 1.2331 for the normal).
inline double moors(const BnParams& p) {
  auto q = [&](double u) { return quantile(p, u); };
  return (q(7.0 / 8) - q(5.0 / 8) + q(3.0 / 8) - q(1.0 / 8)) / (q(6.0 / 8) - q(2.0 / 8));
}

// ---------------------------------------------------------------------------
// Moment generating function

namespace detail {

// Flags a partial-sum sequence whose increments grow three times running.
// Increments are fed in pairs of consecutive terms, because both expansions
// alternate between even- and odd-order contributions of different size.
class DivergenceMonitor {
 public:
  bool push(double increment) {
    const double a = std::abs(increment);
    if (a == 0.0) return false;
    growth_ = (have_ && a > last_) ? growth_ + 1 : 0;
    last_ = a;
    have_ = true;
    return growth_ >= 3;
  }

 private:
  double last_ = 0.0;
  int growth_ = 0;
  bool have_ = false;
};

// M_Z(tau) = sum_s tau^s/s! E_K(Z^s) through the quantile series.
inline MgfResult mgf_z_quantile(const BnParams& p, double tau, const Settings& cfg) {
  const int S = cfg.mgf_s_terms;
  const auto m = quantile_series_moments_t<MgfReal>(p.alpha, p.beta, S, cfg.series_n, cfg.series_k);
  const auto m2 =
      quantile_series_moments_t<MgfReal>(p.alpha, p.beta, S, cfg.series_n, cfg.series_k - 2);
  MgfReal sum(0), sum2(0), coef(1), pair(0);
  const MgfReal t(tau);
  DivergenceMonitor monitor;
  double last = 0.0;
  for (int s = 0; s <= S; ++s) {
    if (s > 0) coef *= t / s;
    const MgfReal term = coef * m[s];
    sum += term;
    sum2 += coef * m2[s];
    pair += term;
    if (s % 2 == 1) {
      last = static_cast<double>(pair);
      pair = 0;
      if (monitor.push(last))
        throw ConvergenceError("mgf: quantile-series partial sums diverge",
                               static_cast<double>(sum), std::abs(last), s);
    }
  }
  const double trunc = static_cast<double>(abs(sum - sum2)) * cfg.series_k;
  return {static_cast<double>(sum), trunc + std::abs(last)};
}

// M_Z(tau) by the Phi-power expansion: M(-t) = (1/sqrt(2 pi)) sum pi_r c_{r,j} J(t, j), t = -tau.
inline MgfResult mgf_z_phi_power(const BnParams& p, double tau, const Settings& cfg) {
  const int R = cfg.mgf_r_terms, Jmax = cfg.mgf_j_terms;
  const auto pi = series::weights_pi(p.alpha, p.beta, R, std::max(R, Jmax), cfg.mgf_nu_terms);
  const auto jt = series::gaussian_moment_integrals(-tau, Jmax);
  const auto a = series::phi_power_series(Jmax);
  std::vector<series::SeriesCoeffs<double>> c;
  c.reserve(static_cast<std::size_t>(R) + 1);
  for (int r = 0; r <= R; ++r) c.push_back(series::power_series_pow(a, r, Jmax));
  const double inv_root = specfun::kInvSqrt2Pi;
  // Partial sums are accumulated by total x-power j so that divergence of the
  // expansion shows up as growth of successive increments.
  double sum = 0.0, pair = 0.0, last = 0.0;
  DivergenceMonitor monitor;
  for (int j = 0; j <= Jmax; ++j) {
    double inc = 0.0;
    for (int r = 0; r <= R; ++r) inc += pi[r] * c[r][j];
    inc *= jt[j] * inv_root;
    sum += inc;
    pair += inc;
    if (j % 2 == 1) {
      last = pair;
      pair = 0.0;
      if (monitor.push(last))
        throw ConvergenceError("mgf: Phi-power expansion diverges", sum, std::abs(last), j);
    }
  }
  return {sum, std::abs(last)};
}

}  // namespace detail

inline MgfResult mgf(const BnParams& p, double t, MgfMethod method, const Settings& cfg = {}) {
  if (!std::isfinite(t) || std::abs(t) > cfg.mgf_t_max)
    throw DomainError("mgf: |t| must not exceed t_max = " + std::to_string(cfg.mgf_t_max));
  if (t == 0.0) return {1.0, 0.0};
  const double tau = p.sigma * t;
  const double shift = std::exp(p.mu * t);
  MgfResult z;
  switch (method) {
    case MgfMethod::quadrature: {
      const BnParams zp = p.standardized();
      const Estimate e = integrate(
          [&](double x) { return std::exp(tau * x + log_pdf(zp, x)); }, -INFINITY, INFINITY, cfg.quad);
      z = {e.value, e.error};
      break;
    }
    case MgfMethod::series_quantile: z = detail::mgf_z_quantile(p, tau, cfg); break;
    case MgfMethod::series_phi_power: z = detail::mgf_z_phi_power(p, tau, cfg); break;
  }
  return {shift * z.value, shift * z.est_error};
}

// ---------------------------------------------------------------------------
// Mean deviations

namespace detail {

// Incomplete-quantile integrals J_Z(F) = int_0^F Q_Z(u) du from the quantile
// series of both halves of (0, 1).
class IncompleteQuantile {
 public:
  IncompleteQuantile(const BnParams& p, int N, int K)
      : alpha_(p.alpha), beta_(p.beta),
        lower_(series::compose_quantile_f(QsReal(p.alpha), QsReal(p.beta), N, K)),
        upper_(series::compose_quantile_f(QsReal(p.beta), QsReal(p.alpha), N, K)) {
    const QsReal half(0.5);
    mean_ = series::partial_integral(lower_, QsReal(alpha_), half) -
            series::partial_integral(upper_, QsReal(beta_), half);
  }

  double mean() const { return static_cast<double>(mean_); }

  // F and 1 - F passed separately to keep the upper tail exact.
  double operator()(double F, double Fc) const {
    if (F <= 0.5) return static_cast<double>(series::partial_integral(lower_, QsReal(alpha_), QsReal(F)));
    return static_cast<double>(mean_ +
                               series::partial_integral(upper_, QsReal(beta_), QsReal(Fc)));
  }

 private:
  double alpha_, beta_;
  series::SeriesCoeffs<QsReal> lower_, upper_;
  QsReal mean_;
};

struct DeviationParts {
  double delta1, delta2, mean, median;
};

inline DeviationParts deviations_series(const BnParams& p, int N, int K) {
  const IncompleteQuantile jz(p, N, K);
  const double nu = p.mu + p.sigma * jz.mean();
  const double m = median(p);
  const specfun::BetaTails fnu = cdf_tails(p, nu);
  // J_X(q) = mu F(q) + sigma J_Z(F(q)).
  const double j_nu = p.mu * fnu.lower + p.sigma * jz(fnu.lower, fnu.upper);
  const double j_m = p.mu * 0.5 + p.sigma * jz(0.5, 0.5);
  return {2.0 * (nu * fnu.lower - j_nu), nu - 2.0 * j_m, nu, m};
}

}  // namespace detail

inline MeanDeviations mean_deviations(const BnParams& p, DeviationMethod method = DeviationMethod::series,
                                      const Settings& cfg = {}) {
  if (method == DeviationMethod::series) {
    const auto d = detail::deviations_series(p, cfg.deviation_n, cfg.deviation_k);
    const auto d2 = detail::deviations_series(p, cfg.deviation_n, cfg.deviation_k - 2);
    const double err =
        std::max(std::abs(d.delta1 - d2.delta1), std::abs(d.delta2 - d2.delta2)) * cfg.deviation_k;
    return {d.delta1, d.delta2, d.mean, d.median, err};
  }
  const BnParams z = p.standardized();
  const MomentReport mr = moment(p, 1, MomentMethod::quadrature, cfg);
  const double nu = mr.value, m = median(p);
  auto absdev = [&](double c) {
    const double cz = (c - p.mu) / p.sigma;
    auto g = [&](double x) { return std::abs(p.mu + p.sigma * x - c) * pdf(z, x); };
    const Estimate lo = integrate(g, -INFINITY, cz, cfg.quad);
    const Estimate hi = integrate(g, cz, INFINITY, cfg.quad);
    return Estimate{lo.value + hi.value, lo.error + hi.error};
  };
  const Estimate d1 = absdev(nu), d2 = absdev(m);
  return {d1.value, d2.value, nu, m, d1.error + d2.error + mr.est_error};
}

// ---------------------------------------------------------------------------
// Shannon entropy

namespace detail {

// sum_{n>=1} (1/n) B(a, n + b) / B(a, b), summed to `terms` and completed by
// the midpoint-rule integral of the continuous term over [terms + 1/2, inf).
// The term decays like n^{-1-a}; the tail is integrated in y = log n, where
// it decays exponentially instead.
inline Estimate entropy_log_sum(double a, double b, int terms, const Quadrature& q) {
  const double base = specfun::lgamma(a + b) - specfun::lgamma(b);
  // log of n * term(n) as a function of y = log n. Gamma(n+b)/Gamma(n+a+b)
  // ~ n^{-a} (1 - a(a+2b-1)/(2n)) once n is large.
  auto log_n_term = [&](double y) {
    if (y < std::log(1e7)) {
      const double n = std::exp(y);
      return base + specfun::lgamma(n + b) - specfun::lgamma(n + a + b);
    }
    return base - a * y + std::log1p(-0.5 * a * (a + 2.0 * b - 1.0) * std::exp(-y));
  };
  auto term = [&](double n) { return std::exp(log_n_term(std::log(n))) / n; };
  double sum = 0.0;
  for (int n = 1; n <= terms; ++n) sum += term(n);
  const Estimate tail =
      integrate([&](double y) { return std::exp(log_n_term(y)); }, std::log(terms + 0.5), INFINITY, q);
  // Midpoint-rule defect of the tail, ~ t'(N)/24.
  const double defect = term(terms) * (a + 1.0) / (24.0 * terms);
  return {sum + tail.value, tail.error + std::abs(defect)};
}

}  // namespace detail

// Shannon entropy. The series route uses E(X), E(X^2) from `moment_method`.
inline EntropyResult shannon_entropy(const BnParams& p, EntropyMethod method = EntropyMethod::series,
                                     const Settings& cfg = {},
                                     MomentMethod moment_method = MomentMethod::pwm_sum) {
  if (method == EntropyMethod::quadrature) {
    const BnParams z = p.standardized();
    auto g = [&](double x) {
      const double lf = log_pdf(z, x);
      const double f = std::exp(lf);
      return f == 0.0 ? 0.0 : -f * lf;
    };
    const Estimate e = integrate(g, -INFINITY, INFINITY, cfg.quad);
    return {e.value + std::log(p.sigma), e.error};
  }
  const double lead = specfun::kLogSqrt2Pi + std::log(p.sigma) + p.log_beta();
  const MomentReport m1 = moment(p, 1, moment_method, cfg);
  const MomentReport m2 = moment(p, 2, moment_method, cfg);
  const double quad_part =
      (m2.value - 2.0 * p.mu * m1.value + p.mu * p.mu) / (2.0 * p.sigma * p.sigma);
  double err = (m2.est_error + 2.0 * std::abs(p.mu) * m1.est_error) / (2.0 * p.sigma * p.sigma);
  double logs = 0.0;
  if (p.alpha != 1.0) {
    const Estimate e = detail::entropy_log_sum(p.alpha, p.beta, cfg.entropy_terms, cfg.quad);
    logs += (p.alpha - 1.0) * e.value;
    err += std::abs(p.alpha - 1.0) * e.error;
  }
  if (p.beta != 1.0) {
    const Estimate e = detail::entropy_log_sum(p.beta, p.alpha, cfg.entropy_terms, cfg.quad);
    logs += (p.beta - 1.0) * e.value;
    err += std::abs(p.beta - 1.0) * e.error;
  }
  return {lead + quad_part + logs, err};
}

}  // namespace betanorm
