#pragma once

// Deterministic time integration of the plant.
//
// Output is sampled on a uniform grid t_i = i * sample_interval. Integration
// steps never straddle a sample instant, so every sample is an actual
// integrator state rather than an interpolant. The drive (control force and
// coil current) is evaluated once per sample instant and held constant until
// the next one, i.e. a sampled-data controller with zero-order hold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "finact/core_model.hpp"

namespace finact {

enum class Method { kAdaptive, kRk4 };

struct IntegratorConfig {
  Method method = Method::kAdaptive;
  double dt = 1e-4;  // fixed-step RK4 only
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_time = 10.0;
  double sample_interval = 1e-3;
  double guard = kSingularityGuard;
  double min_step = 1e-15;  // relative to max(1, t); below this a guard event ends the run
  std::size_t max_steps = 100'000'000;

  void validate() const {
    if (!(sample_interval > 0.0)) throw DomainError("IntegratorConfig: sample_interval must be > 0");
    if (!(max_time > 0.0)) throw DomainError("IntegratorConfig: max_time must be > 0");
    if (method == Method::kRk4 && !(dt > 0.0)) throw DomainError("IntegratorConfig: dt must be > 0");
    if (method == Method::kAdaptive && (!(rtol > 0.0) || !(atol > 0.0)))
      throw DomainError("IntegratorConfig: tolerances must be > 0");
  }
};

// Force per unit mass and coil current applied over one sample interval.
struct DriveSample {
  double force = 0.0;
  double current = 0.0;
};

// Called at each sample instant with the sampled state; an empty law means no
// drive.
using DriveLaw = std::function<DriveSample(double t, const State& s)>;

enum class EventKind { kCapture, kGuard };

inline std::string_view to_string(EventKind k) {
  return k == EventKind::kCapture ? "capture" : "guard";
}

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::kCapture;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<DriveSample> drive;
  std::vector<Event> events;

  std::size_t size() const { return times.size(); }
  bool terminated_early() const { return !events.empty(); }
  bool captured() const {
    return std::any_of(events.begin(), events.end(),
                       [](const Event& e) { return e.kind == EventKind::kCapture; });
  }
};

namespace detail {

struct Vec2 {
  double x, v;
};

inline Vec2 axpy(const Vec2& y, double h, std::initializer_list<std::pair<double, const Vec2*>> terms) {
  Vec2 r = y;
  for (const auto& [a, k] : terms) {
    r.x += h * a * k->x;
    r.v += h * a * k->v;
  }
  return r;
}

class Stepper {
 public:
  Stepper(const SystemParams& p, const IntegratorConfig& cfg) : p_(p), cfg_(cfg) {}

  Vec2 f(const Vec2& y) const {
    const auto d = rhs(State{y.x, y.v}, p_, drive_.current, drive_.force, 0.0);
    return {d.dx, d.dv};
  }

  void set_drive(const DriveSample& d) { drive_ = d; }

  // Classical RK4 step.
  Vec2 rk4(const Vec2& y, double h) const {
    const Vec2 k1 = f(y);
    const Vec2 k2 = f(axpy(y, h, {{0.5, &k1}}));
    const Vec2 k3 = f(axpy(y, h, {{0.5, &k2}}));
    const Vec2 k4 = f(axpy(y, h, {{1.0, &k3}}));
    return axpy(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
  }

  // Dormand-Prince 5(4) step; returns the 5th-order solution and writes the
  // scaled error norm (<= 1 means acceptable).
  Vec2 dopri(const Vec2& y, const Vec2& k1, double h, double& err, Vec2& k7) const {
    const Vec2 k2 = f(axpy(y, h, {{1.0 / 5, &k1}}));
    const Vec2 k3 = f(axpy(y, h, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}));
    const Vec2 k4 = f(axpy(y, h, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}));
    const Vec2 k5 = f(axpy(y, h,
                           {{19372.0 / 6561, &k1},
                            {-25360.0 / 2187, &k2},
                            {64448.0 / 6561, &k3},
                            {-212.0 / 729, &k4}}));
    const Vec2 k6 = f(axpy(y, h,
                           {{9017.0 / 3168, &k1},
                            {-355.0 / 33, &k2},
                            {46732.0 / 5247, &k3},
                            {49.0 / 176, &k4},
                            {-5103.0 / 18656, &k5}}));
    const Vec2 y5 = axpy(y, h,
                         {{35.0 / 384, &k1},
                          {500.0 / 1113, &k3},
                          {125.0 / 192, &k4},
                          {-2187.0 / 6784, &k5},
                          {11.0 / 84, &k6}});
    k7 = f(y5);
    const Vec2 e = axpy(Vec2{0.0, 0.0}, h,
                        {{71.0 / 57600, &k1},
                         {-71.0 / 16695, &k3},
                         {71.0 / 1920, &k4},
                         {-17253.0 / 339200, &k5},
                         {22.0 / 525, &k6},
                         {-1.0 / 40, &k7}});
    const double sx = cfg_.atol + cfg_.rtol * std::max(std::abs(y.x), std::abs(y5.x));
    const double sv = cfg_.atol + cfg_.rtol * std::max(std::abs(y.v), std::abs(y5.v));
    const double ex = e.x / sx;
    const double ev = e.v / sv;
    err = std::sqrt(0.5 * (ex * ex + ev * ev));
    return y5;
  }

 private:
  const SystemParams& p_;
  const IntegratorConfig& cfg_;
  DriveSample drive_;
};

}  // namespace detail

// Integrates from `ic` until cfg.max_time, a capture (|x| >= x0 - guard), or a
// step-size underflow near a magnet (guard event).
inline Trajectory integrate(const SystemParams& p, const DriveLaw& drive, const State& ic,
                            const IntegratorConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!(ic.x > -p.x0 && ic.x < p.x0)) throw DomainError("integrate: initial x outside (-x0, x0)");

  const double capture_at = p.x0 - cfg.guard;
  const auto n_samples = static_cast<std::size_t>(std::floor(cfg.max_time / cfg.sample_interval + 1e-9));

  Trajectory traj;
  traj.times.reserve(n_samples + 2);
  traj.states.reserve(n_samples + 2);
  traj.drive.reserve(n_samples + 2);

  detail::Stepper stepper(p, cfg);
  detail::Vec2 y{ic.x, ic.v};
  double t = 0.0;

  auto sample = [&](double ts) {
    const State s{y.x, y.v};
    DriveSample d = drive ? drive(ts, s) : DriveSample{};
    stepper.set_drive(d);
    traj.times.push_back(ts);
    traj.states.push_back(s);
    traj.drive.push_back(d);
  };
  auto terminate = [&](EventKind kind) {
    if (t > traj.times.back()) {
      traj.times.push_back(t);
      traj.states.push_back({y.x, y.v});
      traj.drive.push_back(traj.drive.back());
    }
    traj.events.push_back({t, kind});
  };

  sample(0.0);
  if (std::abs(y.x) >= capture_at) {
    traj.events.push_back({0.0, EventKind::kCapture});
    return traj;
  }

  double h = std::min(cfg.sample_interval, 1e-3) * 0.1;
  std::size_t steps = 0;

  for (std::size_t i = 1; i <= n_samples; ++i) {
    const double t_end = (i == n_samples && std::abs(static_cast<double>(i) * cfg.sample_interval -
                                                     cfg.max_time) < 1e-9 * cfg.max_time)
                             ? cfg.max_time
                             : static_cast<double>(i) * cfg.sample_interval;

    if (cfg.method == Method::kRk4) {
      const double span = t_end - t;
      const auto nsub = static_cast<std::size_t>(std::max(1.0, std::ceil(span / cfg.dt - 1e-9)));
      const double hs = span / static_cast<double>(nsub);
      for (std::size_t j = 0; j < nsub; ++j) {
        detail::Vec2 y_new;
        try {
          y_new = stepper.rk4(y, hs);
        } catch (const SingularityError&) {
          terminate(EventKind::kGuard);
          return traj;
        }
        y = y_new;
        t = (j + 1 == nsub) ? t_end : t + hs;
        if (std::abs(y.x) >= capture_at) {
          terminate(EventKind::kCapture);
          return traj;
        }
      }
    } else {
      detail::Vec2 k1 = stepper.f(y);
      while (t < t_end) {
        if (++steps > cfg.max_steps) {
          terminate(EventKind::kGuard);
          return traj;
        }
        const double remaining = t_end - t;
        const bool last = h >= remaining;
        const double hs = last ? remaining : h;

        double err = 0.0;
        detail::Vec2 k7{};
        detail::Vec2 y_new{};
        bool ok = true;
        try {
          y_new = stepper.dopri(y, k1, hs, err, k7);
          ok = std::isfinite(err);
        } catch (const SingularityError&) {
          ok = false;
        }

        if (ok && err <= 1.0) {
          y = y_new;
          k1 = k7;
          t = last ? t_end : t + hs;
          const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
          // A step cut short by the sample boundary should not shrink h.
          h = last ? std::max(h, hs * fac) : hs * fac;
          if (std::abs(y.x) >= capture_at) {
            terminate(EventKind::kCapture);
            return traj;
          }
        } else {
          h = ok ? hs * std::max(0.2, 0.9 * std::pow(err, -0.2)) : hs * 0.25;
          if (h < cfg.min_step * std::max(1.0, t)) {
            terminate(EventKind::kGuard);
            return traj;
          }
        }
      }
    }
    sample(t_end);
  }
  return traj;
}

inline Trajectory integrate(const SystemParams& p, const State& ic, const IntegratorConfig& cfg) {
  return integrate(p, DriveLaw{}, ic, cfg);
}

// One unactuated trajectory per initial condition, in input order.
inline std::vector<Trajectory> phase_portrait(const SystemParams& p, const std::vector<State>& ics,
                                              const IntegratorConfig& cfg) {
  std::vector<Trajectory> out;
  out.reserve(ics.size());
  for (const auto& ic : ics) out.push_back(integrate(p, ic, cfg));
  return out;
}

}  // namespace finact
