#pragma once

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "betanorm/errors.hpp"
#include "betanorm/specfun.hpp"

// Critical points of the standardized beta-normal density, their
// classification, and the boundary of the bimodality region in the
// (alpha, beta) plane.
//
// With f(z) proportional to Phi^{a-1} (1-Phi)^{b-1} phi, the derivative is
// f'(z) = f(z) s(z) / [Phi (1-Phi)], so the critical points are the roots of s.
namespace betanorm::modality {

// 1 - pi/4: the symmetric shape at which z = 0 turns from mode to antimode.
inline constexpr double kSymmetricCritical = 1.0 - std::numbers::pi / 4.0;

enum class PointKind { mode, antimode, degenerate };
enum class Verdict { unimodal, bimodal };

inline const char* to_string(PointKind k) {
  switch (k) {
    case PointKind::mode: return "mode";
    case PointKind::antimode: return "antimode";
    case PointKind::degenerate: return "degenerate";
  }
  return "unknown";
}

inline const char* to_string(Verdict v) { return v == Verdict::bimodal ? "bimodal" : "unimodal"; }

struct CriticalPoint {
  double z = 0.0;
  PointKind kind = PointKind::mode;
  double s_prime = 0.0;
  // Fourth derivative of the standardized density, filled for degenerate points.
  double fourth_derivative = 0.0;

  // A degenerate point with negative fourth derivative is a (flat) mode.
  bool is_mode() const {
    return kind == PointKind::mode || (kind == PointKind::degenerate && fourth_derivative < 0.0);
  }
};

struct ModalityReport {
  double alpha = 1.0;
  double beta = 1.0;
  Verdict verdict = Verdict::unimodal;
  std::vector<CriticalPoint> critical_points;

  std::vector<double> modes() const {
    std::vector<double> out;
    for (const auto& c : critical_points)
      if (c.is_mode()) out.push_back(c.z);
    return out;
  }
};

struct BoundaryPoint {
  double gamma = 0.0;
  double alpha_star = 0.0;
  double z_star = 0.0;  // location of the local maximum of alpha_gamma(z)
};

struct SearchOptions {
  double window = 12.0;
  int grid_points = 4801;
  double degenerate_tol = 1e-9;
};

namespace detail {

inline void require_shapes(double a, double b, const char* who) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError(std::string(who) + ": shape parameters must be positive and finite");
}

}  // namespace detail

inline double s_fn(double alpha, double beta, double z) {
  const double ph = specfun::phi(z), P = specfun::Phi(z), Q = specfun::Phi_c(z);
  return (alpha - 1.0) * ph * Q - (beta - 1.0) * ph * P - z * P * Q;
}

// s(z) / phi(z): same sign and roots as s, but free of underflow in the far
// tails, where the modes of very small shapes live.
inline double s_scaled_fn(double alpha, double beta, double z) {
  const double P = specfun::Phi(z), Q = specfun::Phi_c(z);
  const double mills = std::exp(specfun::log_Phi(z) + specfun::log_Phi_c(z) - specfun::log_phi(z));
  return (alpha - 1.0) * Q - (beta - 1.0) * P - z * mills;
}

inline double s_prime_fn(double alpha, double beta, double z) {
  const double ph = specfun::phi(z), P = specfun::Phi(z), Q = specfun::Phi_c(z);
  return -P * Q - z * ph * (alpha - (alpha + beta) * P) + (2.0 - alpha - beta) * ph * ph;
}

// Log of the unnormalized standardized density.
inline double log_density_kernel(double alpha, double beta, double z) {
  double v = specfun::log_phi(z);
  if (alpha != 1.0) v += (alpha - 1.0) * specfun::log_Phi(z);
  if (beta != 1.0) v += (beta - 1.0) * specfun::log_Phi_c(z);
  return v;
}

// Fourth derivative of the normalized standardized density: central
// differences at steps h and h/2 combined by one Richardson step.
inline double density_fourth_derivative(double alpha, double beta, double z, double h = 1e-2) {
  const double lb = specfun::log_beta(alpha, beta);
  auto f = [&](double x) { return std::exp(log_density_kernel(alpha, beta, x) - lb); };
  auto d4 = [&](double k) {
    return (f(z + 2 * k) - 4 * f(z + k) + 6 * f(z) - 4 * f(z - k) + f(z - 2 * k)) / (k * k * k * k);
  };
  const double coarse = d4(h), fine = d4(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

namespace detail {

// Locate a sign change of g inside [lo, hi] to full double precision.
template <class G>
double refine_root(const G& g, double lo, double hi, double glo, double ghi) {
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      g, lo, hi, glo, ghi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

// All sign changes of g on the grid lo + i*step, i = 0..n-1.
template <class G>
void scan_roots(const G& g, double lo, double step, int n, std::vector<double>& roots) {
  double x0 = lo, g0 = g(x0);
  if (g0 == 0.0) roots.push_back(x0);
  for (int i = 1; i < n; ++i) {
    const double x1 = lo + i * step, g1 = g(x1);
    if (g1 == 0.0)
      roots.push_back(x1);
    else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0))
      roots.push_back(refine_root(g, x0, x1, g0, g1));
    x0 = x1;
    g0 = g1;
  }
}

inline void dedupe(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double x : v)
    if (out.empty() || x - out.back() > 1e-9 * (1.0 + std::abs(x))) out.push_back(x);
  v.swap(out);
}

}  // namespace detail

// Roots of s on [-window, window], classified by the sign of s'. Roots that
// crowd within one grid cell of each other are separated by rescanning the
// neighbourhood of every root on successively finer grids.
inline std::vector<CriticalPoint> find_critical_points(double alpha, double beta,
                                                       const SearchOptions& opt = {}) {
  detail::require_shapes(alpha, beta, "find_critical_points");
  if (opt.grid_points < 3 || !(opt.window > 0.0))
    throw DomainError("find_critical_points: invalid search window");
  auto s = [&](double z) { return s_scaled_fn(alpha, beta, z); };
  // The outermost modes sit near -sqrt((1 - alpha)/alpha) and
  // sqrt((1 - beta)/beta); widen the window so that both are bracketed,
  // keeping the grid spacing of the configured window.
  const double reach = 1.5 / std::sqrt(std::min(alpha, beta)) + 1.0;
  const double window = std::max(opt.window, reach);
  const int points =
      static_cast<int>(std::ceil((opt.grid_points - 1) * window / opt.window)) + 1;
  const double step = 2.0 * window / (points - 1);
  std::vector<double> roots;
  detail::scan_roots(s, -window, step, points, roots);
  std::vector<double> frontier = roots;
  double h = step;
  for (int level = 0; level < 3 && !frontier.empty(); ++level) {
    std::vector<double> found;
    const int fine = 401;
    for (double r : frontier) {
      std::vector<double> local;
      detail::scan_roots(s, r - h, 2.0 * h / (fine - 1), fine, local);
      for (double x : local)
        if (std::abs(x - r) > 1e-9 * (1.0 + std::abs(r))) found.push_back(x);
    }
    detail::dedupe(found);
    std::vector<double> fresh;
    for (double x : found) {
      const bool known = std::any_of(roots.begin(), roots.end(), [&](double r) {
        return std::abs(x - r) <= 1e-9 * (1.0 + std::abs(r));
      });
      if (!known) fresh.push_back(x);
    }
    roots.insert(roots.end(), fresh.begin(), fresh.end());
    frontier = fresh.empty() ? roots : fresh;
    if (fresh.empty()) break;
    h *= 2.0 / (fine - 1);
  }
  detail::dedupe(roots);
  if (roots.empty())
    throw InternalError("find_critical_points: no critical point found for a smooth density");

  std::vector<CriticalPoint> out;
  for (double z : roots) {
    CriticalPoint c;
    c.z = z;
    c.s_prime = s_prime_fn(alpha, beta, z);
    // The tolerance applies to s' at the centre; far out it is scaled with phi.
    const double tol = opt.degenerate_tol * specfun::phi(z) / specfun::kInvSqrt2Pi;
    if (c.s_prime < -tol) {
      c.kind = PointKind::mode;
    } else if (c.s_prime > tol) {
      c.kind = PointKind::antimode;
    } else {
      c.kind = PointKind::degenerate;
      c.fourth_derivative = density_fourth_derivative(alpha, beta, z);
    }
    out.push_back(c);
  }
  return out;
}

inline ModalityReport classify(double alpha, double beta, const SearchOptions& opt = {}) {
  ModalityReport rep;
  rep.alpha = alpha;
  rep.beta = beta;
  rep.critical_points = find_critical_points(alpha, beta, opt);
  const auto modes = rep.modes();
  rep.verdict = modes.size() >= 2 ? Verdict::bimodal : Verdict::unimodal;
  return rep;
}

// alpha solving s = 0 at z for fixed beta.
inline double alpha_of_z(double beta, double z) {
  if (z == 0.0 || !std::isfinite(z)) throw DomainError("alpha_of_z: z must be finite and nonzero");
  const double P = specfun::Phi(z), Q = specfun::Phi_c(z), ph = specfun::phi(z);
  return z * P / ph - ((2.0 - beta) * P - 1.0) / Q;
}

// beta solving s = 0 at z for fixed alpha.
inline double beta_of_z(double alpha, double z) {
  if (z == 0.0 || !std::isfinite(z)) throw DomainError("beta_of_z: z must be finite and nonzero");
  const double P = specfun::Phi(z), Q = specfun::Phi_c(z), ph = specfun::phi(z);
  return (alpha - 1.0) / P - z * Q / ph + 2.0 - alpha;
}

// Symmetric case alpha = beta: 1 + z Phi (1-Phi) / [phi (1 - 2 Phi)].
inline double alpha_symmetric_of_z(double z) {
  if (z == 0.0 || !std::isfinite(z))
    throw DomainError("alpha_symmetric_of_z: z must be finite and nonzero");
  const double P = specfun::Phi(z), Q = specfun::Phi_c(z), ph = specfun::phi(z);
  const double centred = -std::erf(z / std::numbers::sqrt2);  // 1 - 2 Phi without cancellation
  return 1.0 + z * P * Q / (ph * centred);
}

// Derivatives in z of alpha_beta(z) and beta_alpha(z).
inline double alpha_of_z_derivative(double beta, double z) {
  const double P = specfun::Phi(z), Q = specfun::Phi_c(z), ph = specfun::phi(z);
  return (1.0 + z * z) * P / ph + z + (beta - 1.0) * ph / (Q * Q);
}

inline double beta_of_z_derivative(double alpha, double z) {
  const double P = specfun::Phi(z), Q = specfun::Phi_c(z), ph = specfun::phi(z);
  return (1.0 - alpha) * ph / (P * P) + z - (1.0 + z * z) * Q / ph;
}

// Limit of alpha_symmetric_of_z at 0 by Richardson extrapolation in z^2.
inline double critical_alpha_symmetric() {
  constexpr int levels = 6;
  double table[levels][levels];
  double h = 0.2;
  for (int i = 0; i < levels; ++i, h *= 0.5) {
    table[i][0] = alpha_symmetric_of_z(h);
    double factor = 4.0;
    for (int j = 1; j <= i; ++j, factor *= 4.0)
      table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1.0);
  }
  const double value = table[levels - 1][levels - 1];
  if (std::abs(value - kSymmetricCritical) > 1e-6 ||
      std::abs(value - table[levels - 2][levels - 2]) > 1e-6)
    throw InternalError("critical_alpha_symmetric: extrapolation does not agree with 1 - pi/4");
  return value;
}

namespace detail {

// Local maximum of a curve c(z) given its derivative: the first +/- sign
// change of the derivative on the grid, refined by bracketed root finding.
template <class C, class D>
BoundaryPoint curve_local_max(double gamma, const C& curve, const D& deriv, double lo, double hi,
                              const char* who) {
  const int n = 2401;
  const double step = (hi - lo) / (n - 1);
  double z0 = lo, d0 = deriv(z0);
  for (int i = 1; i < n; ++i) {
    const double z1 = lo + i * step, d1 = deriv(z1);
    if (d0 > 0.0 && d1 <= 0.0) {
      const double z = refine_root(deriv, z0, z1, d0, d1);
      return {gamma, curve(z), z};
    }
    z0 = z1;
    d0 = d1;
  }
  throw DomainError(std::string(who) + ": no interior local maximum for gamma = " +
                    std::to_string(gamma));
}

inline void require_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0 && gamma < kSymmetricCritical))
    throw DomainError(std::string(who) + ": gamma must lie in (0, 1 - pi/4)");
}

}  // namespace detail

// alpha*_gamma: local maximum of alpha_gamma(z).
inline BoundaryPoint boundary_alpha_star(double gamma) {
  detail::require_gamma(gamma, "boundary_alpha_star");
  auto curve = [gamma](double z) { return alpha_of_z(gamma, z); };
  auto deriv = [gamma](double z) { return alpha_of_z_derivative(gamma, z); };
  return detail::curve_local_max(gamma, curve, deriv, -8.0, 8.0, "boundary_alpha_star");
}

// beta*_gamma: local maximum of beta_gamma(z), computed on its own branch.
inline BoundaryPoint boundary_beta_star(double gamma) {
  detail::require_gamma(gamma, "boundary_beta_star");
  auto curve = [gamma](double z) { return beta_of_z(gamma, z); };
  auto deriv = [gamma](double z) { return beta_of_z_derivative(gamma, z); };
  return detail::curve_local_max(gamma, curve, deriv, -8.0, 8.0, "boundary_beta_star");
}

inline bool bimodal_region_contains(double alpha, double beta) {
  detail::require_shapes(alpha, beta, "bimodal_region_contains");
  if (!(alpha < kSymmetricCritical) || !(beta < kSymmetricCritical)) return false;
  return alpha < boundary_alpha_star(beta).alpha_star &&
         beta < boundary_beta_star(alpha).alpha_star;
}

// Mode tracking along a parameter grid.
enum class ScanAxis { alpha, beta };

struct ScanRow {
  double parameter = 0.0;
  std::vector<double> modes;
};

struct BranchEvent {
  double parameter = 0.0;
  int modes_before = 0;
  int modes_after = 0;
};

struct MonotonicityTable {
  ScanAxis axis = ScanAxis::alpha;
  double fixed = 0.0;
  std::vector<ScanRow> rows;
  std::vector<BranchEvent> events;
  int violations = 0;
};

// Modes along a sorted grid of one shape with the other held at `fixed`.
// Consecutive rows with equal mode counts are matched by nearest
// continuation; count changes are logged as branch events. Along alpha each
// tracked mode must not decrease, along beta it must not increase.
inline MonotonicityTable mode_monotonicity_scan(double fixed, const std::vector<double>& grid,
                                                ScanAxis axis = ScanAxis::alpha,
                                                const SearchOptions& opt = {}) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw DomainError("mode_monotonicity_scan: grid must be sorted ascending");
  MonotonicityTable table;
  table.axis = axis;
  table.fixed = fixed;
  constexpr double slack = 1e-10;
  for (double v : grid) {
    const double a = axis == ScanAxis::alpha ? v : fixed;
    const double b = axis == ScanAxis::alpha ? fixed : v;
    ScanRow row{v, classify(a, b, opt).modes()};
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back().modes;
      if (prev.size() != row.modes.size()) {
        table.events.push_back({v, static_cast<int>(prev.size()), static_cast<int>(row.modes.size())});
      } else {
        for (double z : row.modes) {
          const auto nearest = std::min_element(prev.begin(), prev.end(), [&](double x, double y) {
            return std::abs(x - z) < std::abs(y - z);
          });
          const double dz = z - *nearest;
          if (axis == ScanAxis::alpha ? dz < -slack : dz > slack) ++table.violations;
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace betanorm::modality
