#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "finact/control.hpp"
#include "finact/design.hpp"

namespace finact {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(PidStep, ZeroErrorZeroForce) {
  PidState ps;
  auto out = pid_step(default_gains(439.3), ps, 0.0, 0.0);
  EXPECT_EQ(out.force, 0.0);
  out = pid_step(default_gains(439.3), out.state, 0.0, 0.001);
  EXPECT_EQ(out.force, 0.0);
}

TEST(PidStep, ProportionalOnly) {
  const PidGains g{7.0, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(pid_step(g, PidState{}, 0.3, 0.0).force, 2.1);
}

TEST(PidStep, TrapezoidIntegralFromReset) {
  const PidGains g{0.0, 0.0, 5.0};
  const double e = 0.2, dt = 0.01;
  const auto first = pid_step(g, PidState{}, e, 0.0);
  EXPECT_EQ(first.force, 0.0);
  EXPECT_EQ(first.state.integral, 0.0);
  const auto second = pid_step(g, first.state, e, dt);
  EXPECT_DOUBLE_EQ(second.force, 5.0 * e * dt);
}

TEST(PidStep, BackwardDifferenceDerivative) {
  const PidGains g{0.0, 2.0, 0.0};
  const auto a = pid_step(g, PidState{}, 0.1, 0.0);
  const auto b = pid_step(g, a.state, 0.3, 0.1);
  EXPECT_NEAR(b.force, 2.0 * (0.3 - 0.1) / 0.1, 1e-12);
  const auto c = pid_step(g, a.state, 0.3, 0.1, -4.0);
  EXPECT_DOUBLE_EQ(c.force, -8.0);
}

TEST(PidStep, TimeMustIncrease) {
  const auto a = pid_step(PidGains{1, 1, 1}, PidState{}, 0.1, 1.0);
  EXPECT_THROW(pid_step(PidGains{1, 1, 1}, a.state, 0.1, 1.0), DomainError);
  EXPECT_THROW(pid_step(PidGains{1, 1, 1}, a.state, 0.1, 0.5), DomainError);
}

TEST(PidStep, LinearInErrorHistory) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  const PidGains g{3.0, 0.7, 11.0};
  for (int trial = 0; trial < 20; ++trial) {
    const double a = n(rng), b = n(rng);
    PidState s1, s2, s12;
    for (int i = 0; i < 50; ++i) {
      const double t = 0.01 * i;
      const double e1 = n(rng), e2 = n(rng);
      const auto o1 = pid_step(g, s1, e1, t);
      const auto o2 = pid_step(g, s2, e2, t);
      const auto o12 = pid_step(g, s12, a * e1 + b * e2, t);
      EXPECT_NEAR(o12.force, a * o1.force + b * o2.force, 1e-9 * (1 + std::abs(o12.force)));
      s1 = o1.state;
      s2 = o2.state;
      s12 = o12.state;
    }
  }
}

class Tracking : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    params_ = reference_params();
    saddle_ = saddle_position(params_);
    table_ = build_frequency_table(params_, table_amplitudes(saddle_));
  }

  static Trajectory track(double gamma, double A, State ic, double periods = 20.0, ReferencePlan* plan_out = nullptr) {
    SystemParams p = params_;
    p.gamma = gamma;
    const auto plan = plan_reference(A, p, ic, table_);
    if (plan_out) *plan_out = plan;
    IntegratorConfig cfg;
    cfg.max_time = periods * plan.period();
    return closed_loop(p, default_gains(p.k), plan, ic, cfg);
  }

  static SystemParams params_;
  static double saddle_;
  static FrequencyTable table_;
};

SystemParams Tracking::params_;
double Tracking::saddle_ = 0.0;
FrequencyTable Tracking::table_;

TEST_F(Tracking, PhaseFromInitialCondition) {
  const double A = 0.5 * saddle_;
  const double w = 2 * kPi * lookup(table_, A);
  EXPECT_NEAR(plan_reference(A, params_, {A, 0.0}, table_).phase, 0.0, 1e-15);
  EXPECT_NEAR(plan_reference(A, params_, {0.0, -A * w}, table_).phase, kPi / 2, 1e-12);
  EXPECT_NEAR(plan_reference(A, params_, {0.5 * A, -A * w * std::sin(kPi / 3)}, table_).phase, kPi / 3, 1e-12);
  // Clamped: x(0) beyond A is treated as A.
  EXPECT_NEAR(plan_reference(A, params_, {1.25 * A, 0.0}, table_).phase, 0.0, 1e-15);
}

TEST_F(Tracking, ReferenceReproducesInitialCondition) {
  const double A = 0.6 * saddle_;
  const double w = 2 * kPi * lookup(table_, A);
  for (double phi : {-2.5, -1.0, 0.3, 1.4, 3.0}) {
    const State ic{A * std::cos(phi), -A * w * std::sin(phi)};
    const auto plan = plan_reference(A, params_, ic, table_);
    EXPECT_NEAR(plan.position(0.0), ic.x, 1e-15);
    EXPECT_NEAR(plan.velocity(0.0), ic.v, 1e-12);
  }
}

TEST_F(Tracking, AmplitudeOutsideTableRejected) {
  EXPECT_THROW(plan_reference(0.99 * saddle_, params_, {0.0, 0.0}, table_), DomainError);
  EXPECT_THROW(plan_reference(0.01 * saddle_, params_, {0.0, 0.0}, table_), DomainError);
}

TEST_F(Tracking, UndampedRunsConvergeToReferenceAmplitude) {
  const double A = 0.8 * saddle_;
  for (double f : {1.0, 0.5, 1.25}) {
    ReferencePlan plan;
    const auto tr = track(0.0, A, {f * A, 0.0}, 10.0, &plan);
    ASSERT_FALSE(tr.terminated_early());
    const double T = plan.period();
    EXPECT_NEAR(amplitude_between(tr, 9 * T, 10 * T), A, 0.02 * A) << "x(0)=" << f << "A";
  }
}

TEST_F(Tracking, NearlyLinearOrbitNeedsAlmostNoEffort) {
  // On the first table node the reference is (to high accuracy) a free orbit.
  const double A = table_.entries.front().amplitude;
  const auto tr = track(0.0, A, {A, 0.0});
  EXPECT_LT(mean_abs_control_force(tr), 1e-3 * params_.k * A);
}

TEST_F(Tracking, StrongDampingStillSustainsOscillation) {
  const double A = 0.8 * saddle_;
  ReferencePlan plan;
  const auto tr = track(damping_from_Q(0.5, params_.k), A, {A, 0.0}, 20.0, &plan);
  ASSERT_FALSE(tr.terminated_early());
  const double t_end = tr.times.back();
  EXPECT_NEAR(amplitude_between(tr, t_end - plan.period(), t_end), A, 0.05 * A);
  EXPECT_GT(mean_abs_control_force(tr), 0.0);
}

TEST_F(Tracking, PeakForceGrowsWithDamping) {
  const double A = 0.8 * saddle_;
  double prev = -1.0;
  for (double gamma : {0.0, 4.19, 8.38, 20.96}) {
    const auto peak = max_control_force(track(gamma, A, {A, 0.0}));
    EXPECT_GE(peak.force, prev) << "gamma=" << gamma;
    prev = peak.force;
  }
}

TEST_F(Tracking, DoublingAmplitudeDoesNotLowerPeakForce) {
  const double gamma = 8.38;
  const double A = 0.4 * saddle_;
  const auto small = max_control_force(track(gamma, A, {A, 0.0}));
  const auto large = max_control_force(track(gamma, 2 * A, {2 * A, 0.0}));
  EXPECT_GE(large.force, small.force);
}

TEST(MaxControlForce, DropsTransient) {
  Trajectory tr;
  for (int i = 0; i < 10; ++i) {
    tr.times.push_back(i);
    tr.states.push_back({0.001 * i, 0.0});
    tr.drive.push_back({i == 0 ? 100.0 : (i == 5 ? -3.0 : 1.0), 0.0});
  }
  const auto peak = max_control_force(tr);
  EXPECT_EQ(peak.force, 3.0);
  EXPECT_EQ(peak.displacement, 0.005);
}

}  // namespace
}  // namespace finact
