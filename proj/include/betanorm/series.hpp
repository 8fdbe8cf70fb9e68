#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "betanorm/errors.hpp"

// Power-series machinery: the beta and normal quantile series, their
// composition, powers of formal series, and the Phi/binomial expansions used
// by the generating-function representation. Every routine is a template on
// the scalar type so the cancellation-heavy consumers can run in extended
// precision; `double` is the default.
namespace betanorm::series {

// Extended-precision scalar used where partial sums cancel heavily.
using Real50 = boost::multiprecision::cpp_bin_float_50;
using Real100 = boost::multiprecision::cpp_bin_float_100;

enum class SeriesKind {
  beta_quantile_a,
  beta_quantile_d,
  steinbrecher_b,
  normal_quantile_c,
  power_e,
  composed_f,
  moment_g,
  phi_series_a,
  phi_power_c,
  weight_nu,
  weight_s,
  weight_pi,
};

inline std::string_view to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::beta_quantile_a: return "beta_quantile_a";
    case SeriesKind::beta_quantile_d: return "beta_quantile_d";
    case SeriesKind::steinbrecher_b: return "steinbrecher_b";
    case SeriesKind::normal_quantile_c: return "normal_quantile_c";
    case SeriesKind::power_e: return "power_e";
    case SeriesKind::composed_f: return "composed_f";
    case SeriesKind::moment_g: return "moment_g";
    case SeriesKind::phi_series_a: return "phi_series_a";
    case SeriesKind::phi_power_c: return "phi_power_c";
    case SeriesKind::weight_nu: return "weight_nu";
    case SeriesKind::weight_s: return "weight_s";
    case SeriesKind::weight_pi: return "weight_pi";
  }
  return "unknown";
}

// Truncated coefficient vector c_0..c_N together with what it represents.
template <class T = double>
struct SeriesCoeffs {
  std::vector<T> coeffs;
  int truncation_order = 0;
  SeriesKind kind = SeriesKind::power_e;

  SeriesCoeffs() : coeffs(1, T(0)) {}
  SeriesCoeffs(std::vector<T> c, SeriesKind k)
      : coeffs(std::move(c)), truncation_order(static_cast<int>(coeffs.size()) - 1), kind(k) {
    validate();
  }

  void validate() const {
    if (coeffs.empty() || truncation_order != static_cast<int>(coeffs.size()) - 1)
      throw InternalError("SeriesCoeffs: length does not match truncation order");
    using std::isfinite;
    using boost::multiprecision::isfinite;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      if (!isfinite(coeffs[i]))
        throw OverflowError("SeriesCoeffs(" + std::string(to_string(kind)) +
                            "): non-finite coefficient at index " + std::to_string(i));
  }

  const T& operator[](int i) const { return coeffs[static_cast<std::size_t>(i)]; }
  int order() const { return truncation_order; }

  // Coefficient i, or zero beyond the truncation order.
  T at(int i) const { return i <= truncation_order ? coeffs[static_cast<std::size_t>(i)] : T(0); }

  // Horner evaluation of sum c_i x^i.
  T eval(const T& x) const {
    T acc(0);
    for (int i = truncation_order; i >= 0; --i) acc = acc * x + coeffs[static_cast<std::size_t>(i)];
    return acc;
  }

  // Index of the last nonzero coefficient (0 for the zero series).
  int effective_order() const {
    for (int i = truncation_order; i > 0; --i)
      if (coeffs[static_cast<std::size_t>(i)] != T(0)) return i;
    return 0;
  }

  template <class U>
  SeriesCoeffs<U> cast() const {
    std::vector<U> out;
    out.reserve(coeffs.size());
    for (const T& c : coeffs) out.push_back(static_cast<U>(c));
    return SeriesCoeffs<U>(std::move(out), kind);
  }
};

namespace detail {

inline void require_order(int N, int min, const char* who) {
  if (N < min)
    throw DomainError(std::string(who) + ": truncation order must be >= " + std::to_string(min));
}

template <class T>
void require_shapes(const T& a, const T& b, const char* who) {
  if (!(a > 0) || !(b > 0))
    throw DomainError(std::string(who) + ": shape parameters must be positive");
}

template <class T>
T log_beta(const T& a, const T& b) {
  return boost::math::lgamma(a) + boost::math::lgamma(b) - boost::math::lgamma(T(a + b));
}

}  // namespace detail

// Generalized binomial coefficient C(x, k) for real x and integer k >= 0,
// by the falling-factorial product (exact zeros for integer x < k).
template <class T>
T binom(const T& x, int k) {
  if (k < 0) return T(0);
  T acc(1);
  for (int m = 0; m < k; ++m) {
    acc *= (x - m);
    acc /= (m + 1);
  }
  return acc;
}

// Cauchy product of two series, truncated at order N.
template <class T>
SeriesCoeffs<T> convolve(const SeriesCoeffs<T>& a, const SeriesCoeffs<T>& b, int N,
                         SeriesKind kind = SeriesKind::power_e) {
  detail::require_order(N, 0, "convolve");
  const int na = std::min(a.effective_order(), N);
  const int nb = std::min(b.effective_order(), N);
  std::vector<T> out(static_cast<std::size_t>(N) + 1, T(0));
  for (int i = 0; i <= na; ++i) {
    const T& ai = a[i];
    if (ai == T(0)) continue;
    const int top = std::min(nb, N - i);
    for (int j = 0; j <= top; ++j) out[static_cast<std::size_t>(i + j)] += ai * b[j];
  }
  return SeriesCoeffs<T>(std::move(out), kind);
}

// Beta quantile series: a_0 = 0, a_1 = 1 and the cubic recurrence for i >= 2.
template <class T = double>
SeriesCoeffs<T> beta_quantile_a(const T& alpha, const T& beta, int N) {
  detail::require_shapes(alpha, beta, "beta_quantile_a");
  detail::require_order(N, 1, "beta_quantile_a");
  std::vector<T> a(static_cast<std::size_t>(N) + 1, T(0));
  a[1] = T(1);
  const T one_minus_alpha = T(1) - alpha;
  const T shape_sum = alpha + beta - 2;
  for (int i = 2; i <= N; ++i) {
    const T den = T(i) * i + (alpha - 2) * i + one_minus_alpha;
    if (den == T(0)) throw DegenerateRecurrenceError("beta_quantile_a: vanishing denominator", i);
    T quad(0);
    if (i != 2) {
      for (int r = 2; r <= i - 1; ++r)
        quad += a[r] * a[i + 1 - r] * (T(r) * one_minus_alpha * (i - r) - T(r) * (r - 1));
    }
    T cubic(0);
    for (int r = 1; r <= i - 1; ++r) {
      if (a[r] == T(0)) continue;
      const T rr = T(r) * (T(r) - alpha);
      for (int s = 1; s <= i - r; ++s) {
        const int t = i + 1 - r - s;
        cubic += a[r] * a[s] * a[t] * (rr + T(s) * shape_sum * t);
      }
    }
    a[i] = (quad + cubic) / den;
  }
  return SeriesCoeffs<T>(std::move(a), SeriesKind::beta_quantile_a);
}

// Which value index 0 of the d-series carries.
enum class DZero { raw, composition };

// d_i = [alpha B(alpha, beta)]^{i/alpha} a_i. With DZero::composition the
// constant term is -1/2, i.e. the series of Q_B(u) - 1/2 in powers of u^{1/alpha}.
template <class T = double>
SeriesCoeffs<T> beta_quantile_d(const T& alpha, const T& beta, int N, DZero zero = DZero::raw) {
  SeriesCoeffs<T> a = beta_quantile_a(alpha, beta, N);
  using std::exp;
  using std::log;
  const T log_scale = log(alpha) + detail::log_beta(alpha, beta);
  std::vector<T> d(static_cast<std::size_t>(N) + 1, T(0));
  d[0] = zero == DZero::composition ? T(-0.5) : T(0);
  for (int i = 1; i <= N; ++i) d[i] = exp(T(i) / alpha * log_scale) * a[i];
  return SeriesCoeffs<T>(std::move(d), SeriesKind::beta_quantile_d);
}

// Steinbrecher's coefficients of Q_SN(u) = sum b_k w^{2k+1}, w = sqrt(2 pi)(u - 1/2).
template <class T = double>
SeriesCoeffs<T> steinbrecher_b(int N) {
  detail::require_order(N, 0, "steinbrecher_b");
  std::vector<T> b(static_cast<std::size_t>(N) + 1, T(0));
  b[0] = T(1);
  for (int k = 0; k + 1 <= N; ++k) {
    T acc(0);
    for (int r = 0; r <= k; ++r) acc += T(2 * k - 2 * r + 1) * b[r] * b[k - r] / T(r + 1);
    b[k + 1] = acc / T(2 * (2 * k + 3));
  }
  return SeriesCoeffs<T>(std::move(b), SeriesKind::steinbrecher_b);
}

// Q_SN(u) = sum c_k (u - 1/2)^k: c_k = 0 for even k, (2 pi)^{k/2} b_{(k-1)/2} for odd k.
template <class T = double>
SeriesCoeffs<T> normal_quantile_c(int N) {
  detail::require_order(N, 0, "normal_quantile_c");
  const SeriesCoeffs<T> b = steinbrecher_b<T>(N / 2);
  const T root = sqrt(boost::math::constants::two_pi<T>());
  std::vector<T> c(static_cast<std::size_t>(N) + 1, T(0));
  T scale = root;  // (2 pi)^{k/2} for k = 1
  for (int k = 1; k <= N; k += 2) {
    c[k] = scale * b[(k - 1) / 2];
    scale *= root * root;
  }
  return SeriesCoeffs<T>(std::move(c), SeriesKind::normal_quantile_c);
}

// How power_series_pow raises a series to an integer power.
enum class PowerMethod {
  recurrence,   // Miller's recurrence, requires d_0 != 0
  convolution,  // repeated squaring of Cauchy products; any d_0
};

// Coefficients e_{k,0..N} of (sum d_i x^i)^k through order N.
//
// The recurrence divides by d_0 and amplifies rounding when the base series
// has zeros close to the origin; the convolution method yields the same
// coefficients without either restriction.
template <class T>
SeriesCoeffs<T> power_series_pow(const SeriesCoeffs<T>& d, int k, int N,
                                 PowerMethod method = PowerMethod::recurrence) {
  detail::require_order(N, 0, "power_series_pow");
  if (k < 0) throw DomainError("power_series_pow: exponent must be >= 0");
  std::vector<T> e(static_cast<std::size_t>(N) + 1, T(0));
  if (k == 0) {
    e[0] = T(1);
    return SeriesCoeffs<T>(std::move(e), SeriesKind::power_e);
  }
  if (method == PowerMethod::convolution) {
    std::vector<T> trunc(static_cast<std::size_t>(N) + 1, T(0));
    for (int i = 0; i <= std::min(N, d.order()); ++i) trunc[i] = d[i];
    SeriesCoeffs<T> base(std::move(trunc), SeriesKind::power_e);
    e[0] = T(1);
    SeriesCoeffs<T> acc(std::move(e), SeriesKind::power_e);
    for (int bits = k;;) {
      if (bits & 1) acc = convolve(acc, base, N);
      bits >>= 1;
      if (bits == 0) break;
      base = convolve(base, base, N);
    }
    return acc;
  }
  const T d0 = d.at(0);
  if (d0 == T(0))
    throw DegenerateRecurrenceError(
        "power_series_pow: d_0 = 0, the recurrence is undefined (use the convolution method)", 0);
  using std::pow;
  e[0] = pow(d0, k);
  for (int i = 1; i <= N; ++i) {
    T acc(0);
    for (int m = 1; m <= i; ++m) {
      const T dm = d.at(m);
      if (dm == T(0)) continue;
      acc += T(m * (k + 1) - i) * dm * e[i - m];
    }
    e[i] = acc / (T(i) * d0);
  }
  return SeriesCoeffs<T>(std::move(e), SeriesKind::power_e);
}

// f_i with Q(u) = sum f_i u^{i/alpha}: sum over k <= K of c_k times the k-th
// power of the d-series (d_0 = -1/2), evaluated in Horner form.
template <class T = double>
SeriesCoeffs<T> compose_quantile_f(const T& alpha, const T& beta, int N, int K) {
  detail::require_order(N, 1, "compose_quantile_f");
  detail::require_order(K, 1, "compose_quantile_f");
  if (K % 2 == 0) throw DomainError("compose_quantile_f: K must be odd");
  const SeriesCoeffs<T> d = beta_quantile_d(alpha, beta, N, DZero::composition);
  const SeriesCoeffs<T> c = normal_quantile_c<T>(K);
  std::vector<T> init(static_cast<std::size_t>(N) + 1, T(0));
  init[0] = c[K];
  SeriesCoeffs<T> f(std::move(init), SeriesKind::composed_f);
  for (int k = K - 1; k >= 0; --k) {
    f = convolve(f, d, N, SeriesKind::composed_f);
    f.coeffs[0] += c[k];
  }
  return f;
}

// Coefficients g_{s,i} of Q(u)^s in powers of u^{1/alpha}, by the recurrence
// g_{s,i} = (i f_0)^{-1} sum_m [m(s+1) - i] f_m g_{s,i-m}.
template <class T>
SeriesCoeffs<T> moment_g(const SeriesCoeffs<T>& f, int s, int N,
                         PowerMethod method = PowerMethod::recurrence) {
  if (s < 1) throw DomainError("moment_g: order s must be >= 1");
  SeriesCoeffs<T> g = power_series_pow(f, s, N, method);
  g.kind = SeriesKind::moment_g;
  return g;
}

// E(Z^s) = sum_i g_{s,i} / (i/alpha + 1), the term-wise integral of Q(u)^s over [0, 1].
template <class T>
T moment_from_g(const SeriesCoeffs<T>& g, const T& alpha) {
  T acc(0);
  for (int i = 0; i <= g.order(); ++i) acc += g[i] / (T(i) / alpha + 1);
  return acc;
}

// Term-wise integral over [0, x] of sum_i g_i u^{i/alpha}.
template <class T>
T partial_integral(const SeriesCoeffs<T>& g, const T& alpha, const T& x) {
  using std::pow;
  const T v = pow(x, T(1) / alpha);
  T acc(0), xp = x;  // xp = x^{i/alpha + 1}
  for (int i = 0; i <= g.order(); ++i, xp *= v) acc += g[i] * xp / (T(i) / alpha + 1);
  return acc;
}

// Maclaurin series of Phi: a_0 = 1/2, a_{2j+1} = (-1)^j 2^{-j} / [sqrt(2 pi)(2j+1) j!].
template <class T = double>
SeriesCoeffs<T> phi_power_series(int N) {
  detail::require_order(N, 0, "phi_power_series");
  std::vector<T> a(static_cast<std::size_t>(N) + 1, T(0));
  a[0] = T(0.5);
  const T inv_root = T(1) / sqrt(boost::math::constants::two_pi<T>());
  T base = inv_root;  // (-1)^j 2^{-j} / [sqrt(2 pi) j!]
  for (int j = 0; 2 * j + 1 <= N; ++j) {
    a[2 * j + 1] = base / T(2 * j + 1);
    base *= T(-0.5) / T(j + 1);
  }
  return SeriesCoeffs<T>(std::move(a), SeriesKind::phi_series_a);
}

// c_{r,0..N}: coefficients of Phi(x)^r, by the power recurrence with c_{r,0} = a_0^r.
template <class T = double>
SeriesCoeffs<T> phi_power_c(int r, int N, PowerMethod method = PowerMethod::recurrence) {
  SeriesCoeffs<T> c = power_series_pow(phi_power_series<T>(N), r, N, method);
  c.kind = SeriesKind::phi_power_c;
  return c;
}

// nu_k = (-1)^k C(beta - 1, k) / B(alpha, beta).
template <class T = double>
SeriesCoeffs<T> binom_weights_nu(const T& alpha, const T& beta, int N) {
  detail::require_shapes(alpha, beta, "binom_weights_nu");
  detail::require_order(N, 0, "binom_weights_nu");
  using std::exp;
  const T inv_b = exp(-detail::log_beta(alpha, beta));
  std::vector<T> nu(static_cast<std::size_t>(N) + 1, T(0));
  for (int k = 0; k <= N; ++k) nu[k] = (k % 2 ? T(-1) : T(1)) * binom(T(beta - 1), k) * inv_b;
  return SeriesCoeffs<T>(std::move(nu), SeriesKind::weight_nu);
}

// s_0..s_R(delta) with Phi^delta = sum s_r Phi^r, the inner sum
// s_r = sum_{j=r}^{J} (-1)^{r+j} C(delta, j) C(j, r) truncated at J >= R.
//
// The finite inner sum telescopes to C(delta, r)(-1)^{J-r} C(delta-r-1, J-r),
// which is evaluated instead of the alternating sum to avoid cancellation.
template <class T = double>
SeriesCoeffs<T> power_reexpand_s(const T& delta, int R, int J) {
  detail::require_order(R, 0, "power_reexpand_s");
  if (!(delta >= 0)) throw DomainError("power_reexpand_s: delta must be >= 0");
  if (J < R) throw DomainError("power_reexpand_s: inner truncation J must be >= R");
  std::vector<T> s(static_cast<std::size_t>(R) + 1, T(0));
  for (int r = 0; r <= R; ++r) {
    const int m = J - r;
    s[r] = binom(delta, r) * (m % 2 ? T(-1) : T(1)) * binom(T(delta - r - 1), m);
  }
  return SeriesCoeffs<T>(std::move(s), SeriesKind::weight_s);
}

// Literal alternating inner sum for s_r(delta); kept to document the identity.
template <class T = double>
T power_reexpand_s_direct(const T& delta, int r, int J) {
  T acc(0);
  for (int j = r; j <= J; ++j) acc += ((r + j) % 2 ? T(-1) : T(1)) * binom(delta, j) * binom(T(j), r);
  return acc;
}

// pi_r = sum_{k <= Knu} nu_k s_r(k + alpha - 1), r <= R, inner truncation J.
template <class T = double>
SeriesCoeffs<T> weights_pi(const T& alpha, const T& beta, int R, int J, int Knu) {
  const SeriesCoeffs<T> nu = binom_weights_nu(alpha, beta, Knu);
  std::vector<T> pi(static_cast<std::size_t>(R) + 1, T(0));
  for (int k = 0; k <= Knu; ++k) {
    if (nu[k] == T(0)) continue;
    const SeriesCoeffs<T> s = power_reexpand_s(T(k + alpha - 1), R, J);
    for (int r = 0; r <= R; ++r) pi[r] += nu[k] * s[r];
  }
  return SeriesCoeffs<T>(std::move(pi), SeriesKind::weight_pi);
}

// J(t, j) = int x^j exp(-t x - x^2/2) dx = (-1)^j sqrt(2 pi) d^j/dt^j exp(t^2/2),
// for j = 0..N. The derivatives are P_j(t) exp(t^2/2) with P_0 = 1, P_1 = t,
// P_{j+1} = t P_j + j P_{j-1}.
template <class T = double>
std::vector<T> gaussian_moment_integrals(const T& t, int N) {
  detail::require_order(N, 0, "gaussian_moment_integrals");
  using std::exp;
  const T front = sqrt(boost::math::constants::two_pi<T>()) * exp(t * t / 2);
  std::vector<T> out(static_cast<std::size_t>(N) + 1);
  T p_prev(1), p = t;
  out[0] = front;
  if (N >= 1) out[1] = -front * t;
  for (int j = 1; j + 1 <= N; ++j) {
    const T next = t * p + T(j) * p_prev;
    p_prev = p;
    p = next;
    out[j + 1] = ((j + 1) % 2 ? -front : front) * p;
  }
  return out;
}

}  // namespace betanorm::series
