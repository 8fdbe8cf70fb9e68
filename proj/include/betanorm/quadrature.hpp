#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "betanorm/errors.hpp"

namespace betanorm {

// Adaptive integration settings shared by every quadrature-based route.
struct Quadrature {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 40;

  void validate() const {
    if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0))
      throw DomainError("Quadrature: tolerances must be nonnegative");
    if (abs_tol == 0.0 && rel_tol == 0.0)
      throw DomainError("Quadrature: abs_tol and rel_tol cannot both be zero");
    if (max_depth < 1) throw DomainError("Quadrature: max_depth must be >= 1");
  }

  double target(double result) const {
    return std::max(abs_tol, rel_tol * std::abs(result));
  }
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  double value, error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class G>
Segment gk15(const G& g, double a, double b, int depth) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = g(center - dx);
    f2[j] = g(center + dx);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double h = std::abs(half);
  double err = std::abs((resk - resg) * half);
  resasc *= h;
  resabs *= h;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * half, err, depth};
}

// Integrate g over the finite interval [a, b], starting from `pieces` panels.
template <class G>
Estimate adaptive(const G& g, double a, double b, const Quadrature& q,
                  int pieces) {
  std::priority_queue<Segment> heap;
  double value = 0.0, error = 0.0;
  const double width = (b - a) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == pieces) ? b : lo + width;
    Segment s = gk15(g, lo, hi, 0);
    value += s.value;
    error += s.error;
    heap.push(s);
  }
  constexpr std::size_t kMaxSegments = 1u << 15;
  while (error > q.target(value)) {
    Segment worst = heap.top();
    if (worst.depth >= q.max_depth || heap.size() >= kMaxSegments) {
      throw ConvergenceError("integrate: refinement limit reached", value,
                             error, static_cast<int>(heap.size()));
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Segment left = gk15(g, worst.a, mid, worst.depth + 1);
    Segment right = gk15(g, mid, worst.b, worst.depth + 1);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [lo, hi]. Either endpoint may
// be infinite; infinite ranges are mapped onto a finite one. The integrand is
// never evaluated at the endpoints, so integrable endpoint singularities are
// tolerated.
template <class F>
Estimate integrate(const F& f, double lo, double hi, const Quadrature& q = {}) {
  q.validate();
  if (std::isnan(lo) || std::isnan(hi))
    throw DomainError("integrate: NaN limit");
  if (lo == hi) return {0.0, 0.0};
  if (lo > hi) {
    Estimate e = integrate(f, hi, lo, q);
    return {-e.value, e.error};
  }
  auto safe = [](double fx, double jac) {
    return fx == 0.0 ? 0.0 : fx * jac;
  };
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (lo_inf && hi_inf) {
    // x = t / (1 - t^2), t in (-1, 1)
    auto g = [&](double t) {
      const double d = 1.0 - t * t;
      return safe(f(t / d), (1.0 + t * t) / (d * d));
    };
    return detail::adaptive(g, -1.0, 1.0, q, 16);
  }
  if (hi_inf) {
    // x = lo + t / (1 - t), t in [0, 1)
    auto g = [&](double t) {
      const double d = 1.0 - t;
      return safe(f(lo + t / d), 1.0 / (d * d));
    };
    return detail::adaptive(g, 0.0, 1.0, q, 8);
  }
  if (lo_inf) {
    // x = hi - t / (1 - t)
    auto g = [&](double t) {
      const double d = 1.0 - t;
      return safe(f(hi - t / d), 1.0 / (d * d));
    };
    return detail::adaptive(g, 0.0, 1.0, q, 8);
  }
  return detail::adaptive(f, lo, hi, q, 4);
}

}  // namespace betanorm
