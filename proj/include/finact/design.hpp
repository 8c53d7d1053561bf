#pragma once

// Sizing of the physical components: magnet force constant, beam stiffness,
// damping from a damping ratio, and solenoid turn count.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "finact/errors.hpp"

namespace finact {

inline constexpr double kMu0 = 4.0 * std::numbers::pi * 1e-7;  // T m / A

// Cylindrical magnet magnetized along its length.
struct MagnetSpec {
  double Br = 1.0;     // remanence, T
  double R = 2e-3;     // radius, m
  double ell = 2e-3;   // length, m

  void validate() const {
    if (!(Br > 0.0) || !(R > 0.0) || !(ell > 0.0))
      throw DomainError("MagnetSpec: Br, R and ell must be > 0");
  }
};

// Rectangular beam simply supported at two points L apart, loaded at y.
struct BeamSpec {
  double E = 0.2e9;        // Pa
  double width = 10e-3;    // m
  double thickness = 0.5e-3;
  double L = 30e-3;
  double y = 15e-3;

  void validate() const {
    if (!(E > 0.0) || !(width > 0.0) || !(thickness > 0.0) || !(L > 0.0))
      throw DomainError("BeamSpec: E, width, thickness and L must be > 0");
    if (!(y > 0.0 && y < L)) throw DomainError("BeamSpec: y must lie in (0, L)");
  }
};

struct SolenoidSpec {
  std::int64_t N = 1;                                      // turns
  double I_max = 20e-3;                                    // A
  double A_turn = std::numbers::pi * 5e-3 * 5e-3;          // mean turn area, m^2
};

// Dipole moment (Br / mu0) * volume, A m^2.
inline double dipole_moment(const MagnetSpec& ms) {
  return ms.Br / kMu0 * std::numbers::pi * ms.R * ms.R * ms.ell;
}

// Force constant between two identical coaxial magnets, F = C / d^4:
//   C = (3 mu0 / 2 pi) (Br / mu0)^2 (pi R^2 ell)^2
inline double magnet_constant(const MagnetSpec& ms) {
  ms.validate();
  const double m = dipole_moment(ms);
  return 3.0 * kMu0 / (2.0 * std::numbers::pi) * m * m;
}

inline double second_moment_of_area(const BeamSpec& bs) {
  return bs.width * bs.thickness * bs.thickness * bs.thickness / 12.0;
}

// Point stiffness of the simply supported beam at y:
//   K = E I 3 L / (y^2 (L - y)^2)
inline double beam_stiffness(const BeamSpec& bs) {
  bs.validate();
  const double a = bs.y * (bs.L - bs.y);
  return bs.E * second_moment_of_area(bs) * 3.0 * bs.L / (a * a);
}

// Per-mass damping for damping ratio Q of the linear spring (Q = 1 critical).
inline double damping_from_Q(double Q, double k) {
  if (!(Q >= 0.0)) throw DomainError("damping_from_Q: Q must be >= 0");
  if (!(k >= 0.0)) throw DomainError("damping_from_Q: k must be >= 0");
  return 2.0 * Q * std::sqrt(k);
}

// G(x_m) = [(x_m + x0)^4 + (x_m - x0)^4] / (x_m^2 - x0^2)^4, m^-4
inline double solenoid_geometry_factor(double x_m, double x0) {
  if (!(x0 > 0.0)) throw DomainError("solenoid_geometry_factor: x0 must be > 0");
  if (!(std::abs(x_m) < x0)) throw SingularityError("solenoid_geometry_factor: |x_m| must be < x0");
  const double a = x_m + x0;
  const double b = x_m - x0;
  const double d = x_m * x_m - x0 * x0;
  const double d2 = d * d;
  return (a * a * a * a + b * b * b * b) / (d2 * d2);
}

// Force on the fin magnet per unit coil current-turn-area product times
// N I A: (3/2) Br R^2 ell G(x_m).
inline double solenoid_force(std::int64_t N, double I, double A_turn, const MagnetSpec& ms,
                             double x_m, double x0) {
  return 1.5 * ms.Br * ms.R * ms.R * ms.ell * static_cast<double>(N) * I * A_turn *
         solenoid_geometry_factor(x_m, x0);
}

// Smallest turn count whose coils deliver F_m (newtons) at current I:
//   N = ceil(F_m / [(3/2) Br R^2 ell I A G(x_m)])
inline std::int64_t solenoid_turns(double F_m, double I, const MagnetSpec& ms, double A_turn,
                                   double x_m, double x0) {
  ms.validate();
  if (!(F_m >= 0.0) || !std::isfinite(F_m)) throw DomainError("solenoid_turns: F_m must be >= 0");
  if (!(I > 0.0)) throw DomainError("solenoid_turns: current must be > 0");
  if (!(A_turn > 0.0)) throw DomainError("solenoid_turns: turn area must be > 0");
  const double per_turn = 1.5 * ms.Br * ms.R * ms.R * ms.ell * I * A_turn *
                          solenoid_geometry_factor(x_m, x0);
  if (!(per_turn > 0.0)) throw DomainError("solenoid_turns: zero force per turn");
  return static_cast<std::int64_t>(std::ceil(F_m / per_turn));
}

}  // namespace finact
