#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "betanorm/errors.hpp"
#include "betanorm/quadrature.hpp"

// Scalar special functions: standard normal pdf/cdf/quantile, beta function,
// the regularized incomplete beta ratio and its inverse.
namespace betanorm::specfun {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934382;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405618;

inline double phi(double z) {
  if (!std::isfinite(z)) throw DomainError("phi: argument must be finite");
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

inline double log_phi(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

inline double Phi(double z) {
  if (std::isnan(z)) throw DomainError("Phi: NaN argument");
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// 1 - Phi(z) without cancellation.
inline double Phi_c(double z) {
  if (std::isnan(z)) throw DomainError("Phi_c: NaN argument");
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// log Phi(z), accurate into the far lower tail where Phi underflows.
inline double log_Phi(double z) {
  if (std::isnan(z)) throw DomainError("log_Phi: NaN argument");
  if (z > 0.0) return std::log1p(-Phi_c(z));
  if (z > -35.0) return std::log(Phi(z));
  if (std::isinf(z)) return -std::numeric_limits<double>::infinity();
  // Mills-ratio asymptotic series.
  const double r = 1.0 / (z * z);
  const double series =
      1.0 + r * (-1.0 + r * (3.0 + r * (-15.0 + r * (105.0 + r * (-945.0 + r * 10395.0)))));
  return log_phi(z) - std::log(-z) + std::log(series);
}

inline double log_Phi_c(double z) { return log_Phi(-z); }

// Inverse of Phi. Wichura's AS 241 rational approximation followed by one
// Halley step against erfc.
inline double norm_quantile(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw DomainError("norm_quantile: probability must lie in (0, 1)");
  if (u > 0.5) return -norm_quantile(1.0 - u);
  if (u == 0.5) return 0.0;

  const double q = u - 0.5;
  double x;
  if (std::abs(q) < 0.425) {
    const double r = 0.180625 - q * q;
    x = q *
        (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
              6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
            1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
          1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
  } else {
    double r = std::sqrt(-std::log(u));
    if (r < 5.0) {
      r -= 1.6;
      r = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
    } else {
      r -= 5.0;
      r = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
    }
    x = -r;
  }
  // Halley refinement; relative residual keeps the deep tail accurate.
  const double e = Phi(x) - u;
  const double t = e / std::exp(log_phi(x));
  return x - t / (1.0 + 0.5 * x * t);
}

inline double lgamma(double x) { return boost::math::lgamma(x); }

inline double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("beta: arguments must be positive and finite");
  return lgamma(a) + lgamma(b) - lgamma(a + b);
}

inline double beta_fn(double a, double b) { return std::exp(log_beta(a, b)); }

// Distribution of mass between the two tails: lower = I_x(a,b), upper = 1 - I_x.
struct BetaTails {
  double lower;
  double upper;
};

namespace detail {

// Modified Lentz evaluation of the incomplete beta continued fraction.
inline double ibeta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 20000;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= eps) return h;
  }
  throw ConvergenceError("inc_beta: continued fraction did not converge", h,
                         std::numeric_limits<double>::quiet_NaN(), max_iter);
}

inline void check_shapes(double a, double b, const char* who) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError(std::string(who) + ": shape parameters must be positive and finite");
}

}  // namespace detail

// I_x(a,b) and its complement. `y` must equal 1 - x; passing it separately
// keeps full precision when x is within rounding of 1.
inline BetaTails inc_beta_tails(double x, double y, double a, double b) {
  detail::check_shapes(a, b, "inc_beta");
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
    throw DomainError("inc_beta: x must lie in [0, 1]");
  if (x == 0.0) return {0.0, 1.0};
  if (y == 0.0) return {1.0, 0.0};
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double lower = front * detail::ibeta_cf(x, a, b) / a;
    return {lower, 1.0 - lower};
  }
  const double upper = front * detail::ibeta_cf(y, b, a) / b;
  return {1.0 - upper, upper};
}

inline double inc_beta(double x, double a, double b) {
  if (std::isnan(x)) throw DomainError("inc_beta: NaN argument");
  return inc_beta_tails(x, 1.0 - x, a, b).lower;
}

// Density of Beta(a,b) at x, in log space.
inline double log_beta_pdf(double x, double a, double b) {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

// x with I_x(a,b) = u. Safeguarded Newton on a shrinking bracket; falls back
// to bisection (geometric when the bracket spans decades near zero). Upper
// probabilities are solved for 1 - x through I_x(a,b) = 1 - I_{1-x}(b,a),
// where 1 - u is exact and the residual does not cancel.
inline double inv_inc_beta(double u, double a, double b) {
  detail::check_shapes(a, b, "inv_inc_beta");
  if (!(u > 0.0 && u < 1.0))
    throw DomainError("inv_inc_beta: probability must lie in (0, 1)");
  if (a == b && u == 0.5) return 0.5;
  if (u > 0.5) return 1.0 - inv_inc_beta(1.0 - u, b, a);

  const double mean = a / (a + b);
  const double lbeta = log_beta(a, b);
  double lo = 0.0, hi = 1.0;
  double x = mean;
  const double at_mean = inc_beta(mean, a, b);
  if (u < at_mean) {
    hi = mean;
    // Leading term of the small-u expansion, I_x ~ x^a / (a B).
    const double guess = std::exp((std::log(u) + std::log(a) + lbeta) / a);
    if (guess > 0.0 && guess < mean) x = guess;
  } else {
    lo = mean;
    const double guess =
        -std::expm1((std::log1p(-u) + std::log(b) + lbeta) / b);
    if (guess > mean && guess < 1.0) x = guess;
  }
  if (x == mean) x = 0.5 * (lo + hi);

  constexpr int max_iter = 400;
  double f = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    f = inc_beta(x, a, b) - u;
    if (f == 0.0) return x;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    const double width = hi - lo;
    if (width <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
    if (std::abs(f) <= 1e-15 * std::min(u, 1.0 - u)) return x;

    const double dens = std::exp(log_beta_pdf(x, a, b));
    double next = x - f / dens;
    const bool wild = !std::isfinite(next) || next <= lo || next >= hi;
    if (wild) {
      if (lo > 0.0 && hi / lo > 1e3)
        next = std::sqrt(lo * hi);
      else if (lo == 0.0 && hi < 1e-3)
        next = hi * 1e-3;
      else
        next = 0.5 * (lo + hi);
    }
    if (next == x) return x;
    x = next;
  }
  throw ConvergenceError("inv_inc_beta: no convergence", x, std::abs(f),
                         max_iter);
}

}  // namespace betanorm::specfun
