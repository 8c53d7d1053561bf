#include <gtest/gtest.h>

#include <numbers>

#include "finact/core_model.hpp"
#include "finact/design.hpp"
#include "oracles.hpp"

namespace finact {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(MagnetConstant, ReferenceMagnet) {
  const MagnetSpec ms{1.0, 2e-3, 2e-3};
  EXPECT_NEAR(dipole_moment(ms), 0.0200, 1e-12);
  EXPECT_NEAR(magnet_constant(ms), 2.40e-10, 1e-20);
  // Within 3% of the commercial-magnet value the reference geometry stands in for.
  EXPECT_NEAR(magnet_constant(ms), 2.460e-10, 0.03 * 2.460e-10);
}

TEST(MagnetConstant, QuadraticInLength) {
  const MagnetSpec a{1.2, 3e-3, 1e-3};
  MagnetSpec b = a;
  b.ell *= 2;
  EXPECT_NEAR(magnet_constant(b) / magnet_constant(a), 4.0, 1e-12);
}

TEST(MagnetConstant, RejectsInvalidSpec) {
  EXPECT_THROW(magnet_constant(MagnetSpec{0.0, 1e-3, 1e-3}), DomainError);
}

TEST(BeamStiffness, ReferenceBeam) {
  const BeamSpec bs{0.2e9, 0.01, 5e-4, 0.03, 0.015};
  EXPECT_NEAR(beam_stiffness(bs), 37.03, 0.005 * 37.03);
}

TEST(BeamStiffness, MidspanIsMostCompliant) {
  BeamSpec bs;
  const double mid = beam_stiffness(bs);
  for (double y : {0.003, 0.008, 0.014, 0.0151, 0.02, 0.027}) {
    bs.y = y;
    EXPECT_GT(beam_stiffness(bs), mid);
  }
}

TEST(BeamStiffness, CubicInThickness) {
  BeamSpec a;
  BeamSpec b = a;
  b.thickness *= 2;
  EXPECT_NEAR(beam_stiffness(b) / beam_stiffness(a), 8.0, 1e-12);
}

TEST(BeamStiffness, SupportPositionDomain) {
  BeamSpec bs;
  bs.y = 0.0;
  EXPECT_THROW(beam_stiffness(bs), DomainError);
  bs.y = bs.L;
  EXPECT_THROW(beam_stiffness(bs), DomainError);
}

TEST(DampingFromQ, Values) {
  EXPECT_EQ(damping_from_Q(0.0, 439.3), 0.0);
  EXPECT_NEAR(damping_from_Q(0.5, 439.3), 20.96, 0.005 * 20.96);
  EXPECT_NEAR(damping_from_Q(1.0, 439.3), 41.91896945298155, 1e-10);
  EXPECT_THROW(damping_from_Q(-0.1, 439.3), DomainError);
}

TEST(GeometryFactor, Values) {
  EXPECT_NEAR(solenoid_geometry_factor(0.0, 0.01), 2e8, 1e-4);
  EXPECT_NEAR(solenoid_geometry_factor(3.48e-3, 0.01), testing::kGeomFactorAt348, 1e-6 * testing::kGeomFactorAt348);
  for (double x : {1e-3, 2.5e-3, 7e-3})
    EXPECT_DOUBLE_EQ(solenoid_geometry_factor(x, 0.01), solenoid_geometry_factor(-x, 0.01));
  EXPECT_THROW(solenoid_geometry_factor(0.01, 0.01), SingularityError);
}

TEST(SolenoidTurns, ZeroForceZeroTurns) {
  EXPECT_EQ(solenoid_turns(0.0, 0.02, MagnetSpec{}, SolenoidSpec{}.A_turn, 1e-3, 0.01), 0);
}

TEST(SolenoidTurns, InvertsForceLaw) {
  const MagnetSpec ms;
  const double A = SolenoidSpec{}.A_turn;
  const double F = solenoid_force(750, 0.02, A, ms, 2e-3, 0.01);
  EXPECT_EQ(solenoid_turns(F * (1 - 1e-12), 0.02, ms, A, 2e-3, 0.01), 750);
  // Linear in force, inverse in current.
  const auto n1 = solenoid_turns(1e-3, 0.02, ms, A, 2e-3, 0.01);
  const auto n2 = solenoid_turns(2e-3, 0.02, ms, A, 2e-3, 0.01);
  const auto n3 = solenoid_turns(1e-3, 0.01, ms, A, 2e-3, 0.01);
  EXPECT_NEAR(static_cast<double>(n2), 2.0 * n1, 1.0);
  EXPECT_NEAR(static_cast<double>(n3), 2.0 * n1, 1.0);
}

TEST(SolenoidTurns, Errors) {
  const MagnetSpec ms;
  EXPECT_THROW(solenoid_turns(1e-3, 0.0, ms, 1e-4, 0.0, 0.01), DomainError);
  EXPECT_THROW(solenoid_turns(1e-3, 0.02, ms, 0.0, 0.0, 0.01), DomainError);
  EXPECT_THROW(solenoid_turns(-1e-3, 0.02, ms, 1e-4, 0.0, 0.01), DomainError);
  EXPECT_THROW(solenoid_turns(1e-3, 0.02, ms, 1e-4, 0.01, 0.01), SingularityError);
}

TEST(SolenoidForce, IsDipoleLawWithCoilMoment) {
  // (3 mu0 / 2 pi) (Br / mu0)(pi R^2 ell) reduces to (3/2) Br R^2 ell.
  const MagnetSpec ms{1.1, 2.5e-3, 3e-3};
  const double lhs = 3.0 * kMu0 / (2.0 * kPi) * dipole_moment(ms);
  const double rhs = 1.5 * ms.Br * ms.R * ms.R * ms.ell;
  EXPECT_NEAR(lhs, rhs, 1e-15 * rhs);
}

TEST(RoundTrip, PhysicalInputsGiveTableValues) {
  PhysicalParams pp;
  pp.C1 = pp.C2 = 2.460e-10;
  pp.K = beam_stiffness(BeamSpec{0.2e9, 0.01, 5e-4, 0.03, 0.015});
  pp.m = 0.0843;
  const auto p = normalize(pp);
  EXPECT_NEAR(p.c1, 2.919e-9, 0.005 * 2.919e-9);
  EXPECT_NEAR(p.k, 439.3, 0.005 * 439.3);
}

}  // namespace
}  // namespace finact
