#include <gtest/gtest.h>

#include <random>

#include "finact/equilibria.hpp"
#include "oracles.hpp"

namespace finact {
namespace {

using testing::kRefSaddle;

TEST(Residual, ZeroAtOriginWhenSymmetric) {
  EXPECT_EQ(equilibrium_residual(0.0, reference_params()), 0.0);
}

TEST(Residual, PositiveAtOriginWhenRightMagnetStronger) {
  auto p = reference_params();
  p.c2 *= 1.1;
  EXPECT_GT(equilibrium_residual(0.0, p), 0.0);
}

TEST(Residual, NearZeroAtOracleSaddle) {
  const auto p = reference_params();
  EXPECT_LT(std::abs(equilibrium_residual(kRefSaddle, p)), 1e-9 * residual_scale(p));
}

TEST(Residual, MatchesFactoredSymmetricPolynomial) {
  // Same polynomial, different algebra: for alpha = 4 and c1 = c2 the general
  // residual expands to the factored symmetric form.
  const auto p = reference_params();
  for (double x : {-0.009, -0.004, -0.001, 0.0005, 0.002, 0.0065}) {
    const double a = equilibrium_residual(x, p);
    const double b = testing::symmetric_fp_poly(x, p.c1, p.k, p.x0);
    EXPECT_NEAR(a, b, 1e-9 * std::abs(b) + 1e-30);
  }
}

TEST(Residual, DomainChecked) {
  EXPECT_THROW(equilibrium_residual(0.01, reference_params()), DomainError);
}

TEST(FindFixedPoints, ReferencePlantStructure) {
  const auto p = reference_params();
  const auto r = find_fixed_points(p);
  ASSERT_EQ(r.fixed_points.size(), 3u);
  EXPECT_NEAR(r.fixed_points[0].x_star, -kRefSaddle, 1e-10);
  EXPECT_LT(std::abs(r.fixed_points[1].x_star), 1e-12);
  EXPECT_NEAR(r.fixed_points[2].x_star, kRefSaddle, 1e-10);
  EXPECT_EQ(r.fixed_points[0].kind, FixedPointKind::kSaddle);
  EXPECT_EQ(r.fixed_points[1].kind, FixedPointKind::kCenter);
  EXPECT_EQ(r.fixed_points[2].kind, FixedPointKind::kSaddle);
  EXPECT_EQ(r.regime, Regime::kOscillatory);
  // Roots are bracketed to 1e-12 m; the residual varies on the scale of x0.
  for (const auto& fp : r.fixed_points)
    EXPECT_LT(std::abs(equilibrium_residual(fp.x_star, p)), residual_scale(p) * 1e-12 / p.x0);
}

TEST(FindFixedPoints, CollapsedRegimeHasSingleSaddle) {
  auto p = reference_params();
  p.c1 = p.c2 = 2.0 * p.k * std::pow(p.x0, 5) / 8.0;
  const auto r = find_fixed_points(p);
  ASSERT_EQ(r.fixed_points.size(), 1u);
  EXPECT_NEAR(r.fixed_points[0].x_star, 0.0, 1e-12);
  EXPECT_EQ(r.fixed_points[0].kind, FixedPointKind::kSaddle);
  EXPECT_EQ(r.regime, Regime::kCollapsed);
}

TEST(FindFixedPoints, PureSpringIsCenterWithDetK) {
  auto p = reference_params();
  p.c1 = p.c2 = 0.0;
  const auto r = find_fixed_points(p);
  ASSERT_EQ(r.fixed_points.size(), 1u);
  EXPECT_EQ(r.fixed_points[0].kind, FixedPointKind::kCenter);
  EXPECT_DOUBLE_EQ(r.fixed_points[0].det, p.k);
}

TEST(FindFixedPoints, CoarseGridReportsIncompleteScan) {
  RootScanConfig cfg;
  cfg.grid_points = 2;
  EXPECT_THROW(find_fixed_points(reference_params(), cfg), IncompleteScanError);
  cfg.grid_points = 3;  // nodes at the two walls and the origin
  cfg.expected_min_roots = 3;
  EXPECT_THROW(find_fixed_points(reference_params(), cfg), IncompleteScanError);
}

TEST(FindFixedPoints, OracleEquivalenceOnGrid) {
  // 50 (c/k, x0) pairs inside the oscillatory regime.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ux0(0.005, 0.02), ufrac(0.05, 0.9);
  for (int i = 0; i < 50; ++i) {
    SystemParams p;
    p.k = 439.3;
    p.x0 = ux0(rng);
    p.c1 = p.c2 = ufrac(rng) * p.k * std::pow(p.x0, 5) / 8.0;
    const auto r = find_fixed_points(p);
    const auto oracle = testing::dense_grid_roots(p.c1, p.k, p.x0);
    ASSERT_EQ(r.fixed_points.size(), 3u) << "case " << i;
    ASSERT_EQ(oracle.size(), 3u) << "case " << i;
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.fixed_points[j].x_star, oracle[j], 1e-10);
    EXPECT_EQ(r.fixed_points[0].kind, FixedPointKind::kSaddle);
    EXPECT_EQ(r.fixed_points[1].kind, FixedPointKind::kCenter);
    EXPECT_EQ(r.fixed_points[2].kind, FixedPointKind::kSaddle);
  }
}

TEST(FindFixedPoints, PositionsIndependentOfDamping) {
  auto p = reference_params();
  const auto a = find_fixed_points(p);
  p.gamma = 20.96;
  const auto b = find_fixed_points(p);
  ASSERT_EQ(a.fixed_points.size(), b.fixed_points.size());
  for (std::size_t i = 0; i < a.fixed_points.size(); ++i) {
    EXPECT_EQ(a.fixed_points[i].x_star, b.fixed_points[i].x_star);
    EXPECT_EQ(b.fixed_points[i].trace, -20.96);
  }
}

TEST(Classify, OriginDeterminant) {
  const auto fp = classify(0.0, reference_params());
  EXPECT_NEAR(fp.det, testing::kRefDetOrigin, 1e-9);
  EXPECT_EQ(fp.trace, 0.0);
  EXPECT_EQ(fp.kind, FixedPointKind::kCenter);
}

TEST(Classify, DampedOriginIsStableSpiral) {
  auto p = reference_params();
  p.gamma = 20.96;
  const auto fp = classify(0.0, p);
  EXPECT_EQ(fp.trace, -20.96);
  EXPECT_EQ(fp.kind, FixedPointKind::kStableSpiral);
}

TEST(Classify, HeavilyDampedOriginIsStableNode) {
  auto p = reference_params();
  p.gamma = 100.0;  // gamma^2 > 4 det
  EXPECT_EQ(classify(0.0, p).kind, FixedPointKind::kStableNode);
}

TEST(Classify, SaddlesHaveNegativeDeterminant) {
  const auto p = reference_params();
  for (double x : {-kRefSaddle, kRefSaddle}) {
    const auto fp = classify(x, p);
    EXPECT_EQ(fp.kind, FixedPointKind::kSaddle);
    EXPECT_NEAR(fp.det, testing::kRefDetSaddle, 1e-6);
  }
}

TEST(Classify, DeterminantMatchesFiniteDifferenceOfForce) {
  auto p = reference_params();
  p.c2 *= 1.3;
  for (double x : {-0.004, -0.001, 0.0, 0.002, 0.005}) {
    const double h = 1e-8;
    auto acc = [&](double y) { return rhs({y, 0.0}, p).dv; };
    const double fd = -(acc(x + h) - acc(x - h)) / (2 * h);
    EXPECT_NEAR(jacobian_det(x, p), fd, 1e-5 * (1 + std::abs(fd)));
  }
}

TEST(CriticalCheck, ReferencePlantIsOscillatory) {
  const auto cc = critical_check(reference_params());
  EXPECT_NEAR(cc.ratio, 2.919e-9 / 439.3, 1e-24);
  EXPECT_NEAR(cc.critical_ratio, 1.25e-11, 1e-24);
  EXPECT_EQ(cc.regime, Regime::kOscillatory);
}

TEST(CriticalCheck, BoundaryAndAbove) {
  auto p = reference_params();
  p.c1 = p.c2 = p.k * std::pow(p.x0, 5) / 8.0;
  EXPECT_EQ(critical_check(p).regime, Regime::kCritical);
  p.c1 = p.c2 = 2.0 * p.k * std::pow(p.x0, 5) / 8.0;
  EXPECT_EQ(critical_check(p).regime, Regime::kCollapsed);
}

TEST(CriticalCheck, RequiresSymmetry) {
  auto p = reference_params();
  p.c2 *= 2;
  EXPECT_THROW(critical_check(p), DomainError);
}

TEST(CriticalCheck, ClassificationDichotomy) {
  // Symmetric, undamped: origin center iff below the critical ratio; any
  // nonzero root is a saddle.
  auto p = reference_params();
  const double crit = p.k * std::pow(p.x0, 5) / 8.0;
  for (double f : {0.1, 0.3, 0.6, 0.9, 0.99, 1.01, 1.5, 3.0}) {
    p.c1 = p.c2 = f * crit;
    const auto r = find_fixed_points(p);
    for (const auto& fp : r.fixed_points) {
      if (std::abs(fp.x_star) < 1e-12)
        EXPECT_EQ(fp.kind, f < 1 ? FixedPointKind::kCenter : FixedPointKind::kSaddle) << f;
      else
        EXPECT_EQ(fp.kind, FixedPointKind::kSaddle) << f;
    }
  }
}

TEST(SweepAsymmetry, ZeroDeltaIsSymmetric) {
  const auto rows = sweep_asymmetry(reference_params(), {0.0});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LT(std::abs(rows[0].center), 1e-12);
  EXPECT_NEAR(rows[0].saddle_left, -rows[0].saddle_right, 1e-12);
}

TEST(SweepAsymmetry, StrongerMagnetPullsCenterAndSaddle) {
  const auto p = reference_params();
  const auto rows = sweep_asymmetry(p, {0.05 * p.c1, 0.1 * p.c1, 0.2 * p.c1});
  double prev = 0.0;
  for (const auto& r : rows) {
    ASSERT_TRUE(r.has_center && r.has_saddle_left && r.has_saddle_right);
    EXPECT_GT(r.center, prev);
    prev = r.center;
    EXPECT_LT(r.saddle_right - r.center, r.center - r.saddle_left);
  }
}

TEST(SweepAsymmetry, RejectsNonPositiveConstants) {
  const auto p = reference_params();
  EXPECT_THROW(sweep_asymmetry(p, {3.0 * p.c1}), DomainError);
}

}  // namespace
}  // namespace finact
