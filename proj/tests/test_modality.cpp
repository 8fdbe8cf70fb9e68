#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "betanorm/modality.hpp"

using namespace betanorm;
using namespace betanorm::modality;

namespace {

const double kCorner = 1.0 - std::numbers::pi / 4.0;

double oracle_Phi(double z) { return boost::math::cdf(boost::math::normal(), z); }
double oracle_phi(double z) { return boost::math::pdf(boost::math::normal(), z); }

// Sign changes of s on a dense grid, as an independent root counter.
int sign_changes(double a, double b, double lo, double hi, int n) {
  int count = 0;
  double prev = s_fn(a, b, lo);
  for (int i = 1; i < n; ++i) {
    const double cur = s_fn(a, b, lo + (hi - lo) * i / (n - 1));
    if ((prev < 0) != (cur < 0)) ++count;
    prev = cur;
  }
  return count;
}

void expect_mirrored(const std::vector<CriticalPoint>& p, const std::vector<CriticalPoint>& q, double tol) {
  ASSERT_EQ(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& m = q[q.size() - 1 - i];
    EXPECT_NEAR(p[i].z, -m.z, tol);
    EXPECT_EQ(p[i].kind, m.kind);
  }
}

}  // namespace

TEST(SFn, Values) {
  for (double a : {0.1, 0.5, 2.0}) EXPECT_NEAR(s_fn(a, a, 0.0), 0.0, 1e-16);
  for (double z : {-2.0, -0.5, 0.7, 3.0}) {
    const double want = -z * oracle_Phi(z) * (1 - oracle_Phi(z));
    EXPECT_NEAR(s_fn(1, 1, z), want, 1e-15);
    EXPECT_LT(s_fn(1, 1, z) * z, 0.0);
  }
  EXPECT_EQ(sign_changes(0.1, 0.15, -6, 6, 120001), 3);
  EXPECT_EQ(sign_changes(0.2, 0.15, -6, 6, 120001), 1);
}

TEST(SFn, ScaledFormSharesSign) {
  for (double z = -30; z <= 30; z += 0.37) {
    const double s = s_fn(0.3, 0.6, z), t = s_scaled_fn(0.3, 0.6, z);
    if (s != 0.0) EXPECT_EQ(s > 0, t > 0) << z;
    if (std::abs(z) < 8) EXPECT_NEAR(t * oracle_phi(z), s, 1e-14);
  }
}

TEST(SPrime, Values) {
  for (double a : {0.1, 0.5, 3.0}) EXPECT_NEAR(s_prime_fn(a, a, 0.0), -0.25 + (1 - a) / std::numbers::pi, 1e-15);
  EXPECT_NEAR(s_prime_fn(kCorner, kCorner, 0.0), 0.0, 1e-12);
  const double h = 1e-5;
  for (auto [a, b] : {std::pair{0.1, 0.15}, {2.0, 3.0}, {0.7, 0.2}})
    for (double z = -5; z <= 5; z += 0.25)
      EXPECT_NEAR((s_fn(a, b, z + h) - s_fn(a, b, z - h)) / (2 * h), s_prime_fn(a, b, z), 1e-7);
}

TEST(CriticalPoints, Examples) {
  const auto normal = find_critical_points(1, 1);
  ASSERT_EQ(normal.size(), 1u);
  EXPECT_NEAR(normal[0].z, 0.0, 1e-12);
  EXPECT_EQ(normal[0].kind, PointKind::mode);

  const auto three = find_critical_points(0.1, 0.15);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[0].kind, PointKind::mode);
  EXPECT_EQ(three[1].kind, PointKind::antimode);
  EXPECT_EQ(three[2].kind, PointKind::mode);

  const auto corner = find_critical_points(kCorner, kCorner);
  ASSERT_EQ(corner.size(), 1u);
  EXPECT_NEAR(corner[0].z, 0.0, 1e-12);
  EXPECT_EQ(corner[0].kind, PointKind::degenerate);
  EXPECT_LT(corner[0].fourth_derivative, 0.0);
  EXPECT_TRUE(corner[0].is_mode());
}

TEST(CriticalPoints, RootCertificate) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.5, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double a = std::pow(10.0, u(gen)), b = std::pow(10.0, u(gen));
    const auto pts = find_critical_points(a, b);
    ASSERT_FALSE(pts.empty());
    for (std::size_t k = 0; k < pts.size(); ++k) {
      EXPECT_LE(std::abs(s_fn(a, b, pts[k].z)), 1e-10) << a << " " << b;
      if (k) EXPECT_GT(pts[k].z - pts[k - 1].z, 1e-6);
    }
    // Modes and antimodes alternate, beginning and ending with a mode.
    EXPECT_TRUE(pts.front().is_mode());
    EXPECT_TRUE(pts.back().is_mode());
  }
}

TEST(CriticalPoints, FarTailModeOfSmallShape) {
  // The left mode of a tiny alpha sits near -sqrt((1 - alpha)/alpha).
  const auto pts = find_critical_points(0.005, 0.3);
  ASSERT_FALSE(pts.empty());
  EXPECT_NEAR(pts.front().z, -std::sqrt(0.995 / 0.005), 0.2);
  EXPECT_EQ(pts.front().kind, PointKind::mode);
}

TEST(Classify, Verdicts) {
  EXPECT_EQ(classify(0.1, 0.15).verdict, Verdict::bimodal);
  EXPECT_EQ(classify(0.1, 0.15).modes().size(), 2u);
  EXPECT_EQ(classify(0.2, 0.15).verdict, Verdict::unimodal);
  for (double a : {0.05, 0.3, 2.0}) {
    EXPECT_EQ(classify(a, kCorner).verdict, Verdict::unimodal) << a;
    EXPECT_EQ(classify(a, 0.5).verdict, Verdict::unimodal) << a;
  }
  EXPECT_EQ(classify(kCorner + 0.01, kCorner + 0.01).verdict, Verdict::unimodal);
  EXPECT_EQ(classify(kCorner - 0.01, kCorner - 0.01).verdict, Verdict::bimodal);
}

TEST(Curves, ReflectionAndInversion) {
  for (double g : {0.05, 0.15, 0.5, 2.0})
    for (double z = -4; z <= 4; z += 0.125) {
      if (z == 0) continue;
      EXPECT_NEAR(alpha_of_z(g, z), beta_of_z(g, -z), 1e-12 * (1 + std::abs(alpha_of_z(g, z))));
      const double a = alpha_of_z(g, z);
      if (a > 0) EXPECT_NEAR(s_fn(a, g, z), 0.0, 1e-10);
    }
  EXPECT_THROW(beta_of_z(0.2, 0.0), DomainError);
  EXPECT_THROW(alpha_symmetric_of_z(0.0), DomainError);
}

TEST(Curves, DerivativesMatchFiniteDifferences) {
  const double h = 1e-6;
  for (double z : {-2.0, -0.9, 0.4, 1.7}) {
    EXPECT_NEAR((alpha_of_z(0.15, z + h) - alpha_of_z(0.15, z - h)) / (2 * h), alpha_of_z_derivative(0.15, z), 1e-6);
    EXPECT_NEAR((beta_of_z(0.15, z + h) - beta_of_z(0.15, z - h)) / (2 * h), beta_of_z_derivative(0.15, z), 1e-6);
  }
}

TEST(Curves, FoldOfAlphaCurve) {
  // Maximum of alpha_{0.15}(z) by Brent minimisation as an oracle.
  auto neg = [](double z) { return -alpha_of_z(0.15, z); };
  const auto [zmax, negmax] = boost::math::tools::brent_find_minima(neg, -2.0, -0.05, 50);
  const auto bp = boundary_alpha_star(0.15);
  EXPECT_NEAR(bp.z_star, zmax, 1e-6);
  EXPECT_NEAR(bp.alpha_star, -negmax, 1e-10);
}

TEST(Critical, SymmetricLimit) {
  EXPECT_NEAR(critical_alpha_symmetric(), kCorner, 1e-9);
  EXPECT_NEAR(critical_alpha_symmetric(), 0.21460183, 1e-8);
  for (double z : {1e-3, -1e-3}) EXPECT_NEAR(alpha_symmetric_of_z(z), kCorner, 1e-5);
}

TEST(Boundary, TableValues) {
  const std::vector<std::pair<double, double>> table{{1e-6, 0.158896}, {0.01, 0.160179}, {0.05, 0.165872},
                                                     {0.10, 0.174668}, {0.15, 0.186511}, {0.20, 0.205147}};
  for (auto [g, want] : table) {
    EXPECT_NEAR(boundary_alpha_star(g).alpha_star, want, 1e-4) << g;
    EXPECT_NEAR(boundary_beta_star(g).alpha_star, want, 1e-4) << g;
  }
  EXPECT_THROW(boundary_alpha_star(0.0), DomainError);
  EXPECT_THROW(boundary_alpha_star(0.3), DomainError);
}

TEST(Region, MembershipAgreesWithClassify) {
  EXPECT_TRUE(bimodal_region_contains(0.1, 0.1));
  EXPECT_FALSE(bimodal_region_contains(1, 1));
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.005, 0.3);
  for (int i = 0; i < 60; ++i) {
    const double a = u(gen), b = u(gen);
    EXPECT_EQ(bimodal_region_contains(a, b), bimodal_region_contains(b, a));
    EXPECT_EQ(bimodal_region_contains(a, b), classify(a, b).verdict == Verdict::bimodal) << a << " " << b;
  }
}

TEST(Region, VerdictFlipsAcrossBoundary) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.01, 0.2);
  for (int i = 0; i < 100; ++i) {
    const double g = u(gen);
    const double a = boundary_alpha_star(g).alpha_star;
    // Crossing the curve along alpha at beta = g.
    EXPECT_EQ(classify(a - 1e-3, g).verdict, Verdict::bimodal) << g;
    EXPECT_EQ(classify(a + 1e-3, g).verdict, Verdict::unimodal) << g;
  }
}

TEST(MirrorSymmetry, SymmetricCaseMirror) {
  for (double a : {0.05, 0.10, 0.15}) {
    const auto pts = find_critical_points(a, a);
    expect_mirrored(pts, pts, 1e-8);
  }
}

TEST(MirrorSymmetry, SwapMirror) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-2.0, 0.7);
  for (int i = 0; i < 30; ++i) {
    const double a = std::pow(10.0, u(gen)), b = std::pow(10.0, u(gen));
    expect_mirrored(find_critical_points(a, b), find_critical_points(b, a), 1e-8);
  }
}

TEST(Monotonicity, ModesTrackParameters) {
  std::vector<double> grid;
  for (double a = 0.02; a <= 0.0901; a += 0.01) grid.push_back(a);
  const auto t = mode_monotonicity_scan(0.15, grid);
  EXPECT_EQ(t.violations, 0);
  EXPECT_EQ(t.rows.size(), grid.size());
  const auto tb = mode_monotonicity_scan(0.15, grid, ScanAxis::beta);
  EXPECT_EQ(tb.violations, 0);

  std::vector<double> sym{0.15, 0.2, kCorner, 0.25, 0.5};
  for (double a : sym) {
    const auto modes = classify(a, a).modes();
    if (a >= kCorner) {
      ASSERT_EQ(modes.size(), 1u);
      EXPECT_NEAR(modes[0], 0.0, 1e-12);
    }
  }
  EXPECT_THROW(mode_monotonicity_scan(0.15, {0.2, 0.1}), DomainError);
}

TEST(Monotonicity, BranchEventsAcrossFold) {
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(0.005 + 0.3 * i / 60);
  const auto t = mode_monotonicity_scan(0.15, grid);
  EXPECT_EQ(t.violations, 0);
  ASSERT_FALSE(t.events.empty());
  EXPECT_EQ(t.events.back().modes_before, 2);
  EXPECT_EQ(t.events.back().modes_after, 1);
}
