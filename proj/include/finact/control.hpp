#pragma once

// PID regulation of the fin displacement onto a sinusoidal reference
//
//   x_d(t) = A cos(w t + phi),   e = x_d - x,
//   F_c    = kp e + kd de/dt + ki int(e),
//
// where w comes from the natural-frequency table so the reference sits on
// (or near) a free orbit of the plant.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "finact/sim.hpp"
#include "finact/spectral.hpp"

namespace finact {

struct PidGains {
  double kp = 0.0;  // 1/s^2
  double kd = 0.0;  // 1/s
  double ki = 0.0;  // 1/s^3
};

// Dimensionally consistent defaults scaled by the plant stiffness.
inline PidGains default_gains(double k) {
  const double wn = std::sqrt(k);
  return {4.0 * k, 2.0 * wn, 0.1 * k * wn};
}

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  double prev_time = 0.0;
  bool started = false;
};

struct PidOutput {
  double force = 0.0;
  PidState state;
};

// One controller update at time t. The integral uses the trapezoid rule over
// [prev_time, t]; the first call only latches the error. When `error_rate` is
// supplied it is used for the derivative term, otherwise a backward
// difference of the held error is taken.
inline PidOutput pid_step(const PidGains& g, const PidState& ps, double error, double t,
                          std::optional<double> error_rate = std::nullopt) {
  PidState next = ps;
  double de = 0.0;
  if (ps.started) {
    const double dt = t - ps.prev_time;
    if (!(dt > 0.0)) throw DomainError("pid_step: time must increase between updates");
    next.integral += 0.5 * (error + ps.prev_error) * dt;
    de = (error - ps.prev_error) / dt;
  }
  if (error_rate) de = *error_rate;
  next.prev_error = error;
  next.prev_time = t;
  next.started = true;
  return {g.kp * error + g.kd * de + g.ki * next.integral, next};
}

struct ReferencePlan {
  double amplitude = 0.0;  // m
  double omega = 0.0;      // rad/s
  double phase = 0.0;      // rad

  double position(double t) const { return amplitude * std::cos(omega * t + phase); }
  double velocity(double t) const { return -amplitude * omega * std::sin(omega * t + phase); }
  double period() const { return 2.0 * std::numbers::pi / omega; }
};

// Reference whose frequency is looked up for amplitude A and whose phase
// matches the initial condition. |x(0)| > A is clamped to +-A.
inline ReferencePlan plan_reference(double amplitude, const SystemParams& p, const State& ic,
                                    const FrequencyTable& table) {
  if (!(amplitude > 0.0)) throw DomainError("plan_reference: amplitude must be > 0");
  if (!(amplitude < p.x0)) throw DomainError("plan_reference: amplitude must be < x0");
  ReferencePlan plan;
  plan.amplitude = amplitude;
  plan.omega = 2.0 * std::numbers::pi * lookup(table, amplitude);
  const double xc = std::clamp(ic.x, -amplitude, amplitude);
  plan.phase = std::atan2(-ic.v / (amplitude * plan.omega), xc / amplitude);
  return plan;
}

// Integrates the plant with the PID force applied as an ideal per-mass force.
// The controller runs at the integrator's sample rate; the error derivative
// uses the known reference velocity minus the measured velocity.
inline Trajectory closed_loop(const SystemParams& p, const PidGains& gains, const ReferencePlan& plan,
                              const State& ic, const IntegratorConfig& cfg) {
  PidState ps;
  DriveLaw law = [&](double t, const State& s) {
    const double e = plan.position(t) - s.x;
    const double de = plan.velocity(t) - s.v;
    auto out = pid_step(gains, ps, e, t, de);
    ps = out.state;
    return DriveSample{out.force, 0.0};
  };
  return integrate(p, law, ic, cfg);
}

struct ControlPeak {
  double force = 0.0;         // max |F_c|, per unit mass
  double displacement = 0.0;  // x where it occurs
};

namespace detail {

inline std::size_t steady_start(const Trajectory& traj, double transient_fraction) {
  if (traj.size() < 2) throw DomainError("steady-state metrics: trajectory too short");
  const auto start = static_cast<std::size_t>(std::floor(transient_fraction * static_cast<double>(traj.size())));
  return std::min(start, traj.size() - 1);
}

}  // namespace detail

// Largest controller output after dropping the first `transient_fraction`
// of the samples.
inline ControlPeak max_control_force(const Trajectory& traj, double transient_fraction = 0.2) {
  ControlPeak peak;
  for (std::size_t i = detail::steady_start(traj, transient_fraction); i < traj.size(); ++i) {
    const double f = std::abs(traj.drive[i].force);
    if (f > peak.force) {
      peak.force = f;
      peak.displacement = traj.states[i].x;
    }
  }
  return peak;
}

inline double mean_abs_control_force(const Trajectory& traj, double transient_fraction = 0.2) {
  const std::size_t start = detail::steady_start(traj, transient_fraction);
  double sum = 0.0;
  for (std::size_t i = start; i < traj.size(); ++i) sum += std::abs(traj.drive[i].force);
  return sum / static_cast<double>(traj.size() - start);
}

// Half the peak-to-peak displacement over samples with t in [t_from, t_to].
inline double amplitude_between(const Trajectory& traj, double t_from, double t_to) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < t_from || traj.times[i] > t_to) continue;
    const double x = traj.states[i].x;
    lo = any ? std::min(lo, x) : x;
    hi = any ? std::max(hi, x) : x;
    any = true;
  }
  if (!any) throw DomainError("amplitude_between: no samples in window");
  return 0.5 * (hi - lo);
}

}  // namespace finact
