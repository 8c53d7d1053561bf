#pragma once

// Plant model of the magnetically actuated fin: a 1-DOF spring-mass system
// whose moving magnet sits between two fixed magnets at -x0 and +x0.
//
//   x' = v
//   v' = F1(x) + F2(x) + Fs1(x, I) + Fs2(x, I) - k x - gamma v
//
// Every quantity here is per unit moving mass.

#include <cmath>
#include <sstream>
#include <string>

#include "finact/errors.hpp"

namespace finact {

// Minimum distance between the fin magnet and any magnet before the dipole
// law is considered physically invalid (contact).
inline constexpr double kSingularityGuard = 1e-6;

// Normalized plant parameters.
struct SystemParams {
  double c1 = 0.0;     // magnet at -x0, N m^4 / kg
  double c2 = 0.0;     // magnet at +x0, N m^4 / kg
  double k = 0.0;      // 1/s^2
  double gamma = 0.0;  // 1/s
  double x0 = 0.01;    // m
  int alpha = 4;
  double cs = 0.0;     // solenoid gain, N m^4 / (kg A)

  double x1() const { return -x0; }
  double x2() const { return x0; }

  bool symmetric() const { return c1 == c2; }

  void validate() const {
    if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("SystemParams: x0 must be > 0");
    if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("SystemParams: k must be >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("SystemParams: gamma must be >= 0");
    if (alpha < 1) throw DomainError("SystemParams: alpha must be >= 1");
    if (!std::isfinite(c1) || !std::isfinite(c2) || !std::isfinite(cs))
      throw DomainError("SystemParams: magnetic constants must be finite");
  }
};

// Dimensional plant parameters, before division by the moving mass.
struct PhysicalParams {
  double C1 = 0.0;     // N m^4
  double C2 = 0.0;     // N m^4
  double K = 0.0;      // N/m
  double Gamma = 0.0;  // N s/m
  double m = 1.0;      // kg
};

struct State {
  double x = 0.0;
  double v = 0.0;
};

struct StateDerivative {
  double dx = 0.0;
  double dv = 0.0;
};

namespace detail {

inline double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

inline void check_in_gap(double x, const SystemParams& p, const char* who) {
  if (!(x > -p.x0 && x < p.x0)) {
    std::ostringstream os;
    os << who << ": x=" << x << " outside (-x0, x0) with x0=" << p.x0;
    throw SingularityError(os.str());
  }
}

}  // namespace detail

// Point-dipole force per unit mass exerted on the fin magnet at x by a magnet
// at xi. Positive ci attracts toward xi.
inline double magnetic_force(double x, double xi, double ci, int alpha,
                             double guard = kSingularityGuard) {
  const double d = x - xi;
  if (d == 0.0 || std::abs(d) < guard) {
    std::ostringstream os;
    os << "magnetic_force: |x - xi| = " << std::abs(d) << " below guard " << guard;
    throw SingularityError(os.str());
  }
  const double sgn = d > 0.0 ? 1.0 : -1.0;
  return -ci * sgn / detail::ipow(std::abs(d), alpha);
}

// Sum of permanent-magnet and solenoid forces per unit mass at x. The two
// coils are co-located with the magnets and wired anti-parallel
// (c_s2 = -c_s1 = cs * current), so their pushes add.
inline double external_force(double x, const SystemParams& p, double current = 0.0,
                             double guard = kSingularityGuard) {
  double f = magnetic_force(x, p.x1(), p.c1, p.alpha, guard) + magnetic_force(x, p.x2(), p.c2, p.alpha, guard);
  if (current != 0.0 && p.cs != 0.0) {
    const double cs_i = p.cs * current;
    f += magnetic_force(x, p.x1(), -cs_i, p.alpha, guard) + magnetic_force(x, p.x2(), cs_i, p.alpha, guard);
  }
  return f;
}

// Right-hand side of the plant. `control` is an additional ideal force per
// unit mass (the PID output), applied directly. The integrator passes a zero
// guard so it can step into the guard band and report a capture there.
inline StateDerivative rhs(const State& s, const SystemParams& p, double current = 0.0,
                           double control = 0.0, double guard = kSingularityGuard) {
  detail::check_in_gap(s.x, p, "rhs");
  const double f = external_force(s.x, p, current, guard);
  return {s.v, f + control - p.k * s.x - p.gamma * s.v};
}

// Energy per unit mass of the unforced plant (alpha = 4 only). Conserved
// along undamped, unactuated trajectories.
inline double total_energy(const State& s, const SystemParams& p) {
  if (p.alpha != 4) throw UnsupportedError("total_energy: only alpha = 4 is supported");
  const double dm = s.x + p.x0;  // distance to magnet at -x0
  const double dp = s.x - p.x0;  // signed distance to magnet at +x0
  if (std::abs(dm) < kSingularityGuard || std::abs(dp) < kSingularityGuard)
    throw SingularityError("total_energy: state within guard distance of a magnet");
  detail::check_in_gap(s.x, p, "total_energy");
  return 0.5 * s.v * s.v + 0.5 * p.k * s.x * s.x + p.c2 / (3.0 * dp * dp * dp) -
         p.c1 / (3.0 * dm * dm * dm);
}

// Divides the dimensional constants by the moving mass. x0, alpha and cs are
// not part of PhysicalParams and are passed through from `geometry`.
inline SystemParams normalize(const PhysicalParams& pp, const SystemParams& geometry = {}) {
  if (!(pp.m > 0.0)) throw DomainError("normalize: mass must be > 0");
  if (pp.K < 0.0) throw DomainError("normalize: K must be >= 0");
  if (pp.Gamma < 0.0) throw DomainError("normalize: Gamma must be >= 0");
  SystemParams p = geometry;
  p.c1 = pp.C1 / pp.m;
  p.c2 = pp.C2 / pp.m;
  p.k = pp.K / pp.m;
  p.gamma = pp.Gamma / pp.m;
  return p;
}

// Plant parameters used throughout the reference design (normalized).
inline SystemParams reference_params() {
  SystemParams p;
  p.c1 = p.c2 = 2.919e-9;
  p.k = 439.3;
  p.gamma = 0.0;
  p.x0 = 1e-2;
  p.alpha = 4;
  return p;
}

}  // namespace finact
