#pragma once

// Fixed points of the unactuated plant, their linear stability, and how they
// move when the two magnets are made unequal.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string_view>
#include <vector>

#include "finact/core_model.hpp"

namespace finact {

enum class FixedPointKind {
  kCenter,
  kSaddle,
  kStableSpiral,
  kUnstableSpiral,
  kStableNode,
  kUnstableNode,
  kDegenerate,
};

inline std::string_view to_string(FixedPointKind kind) {
  switch (kind) {
    case FixedPointKind::kCenter: return "center";
    case FixedPointKind::kSaddle: return "saddle";
    case FixedPointKind::kStableSpiral: return "stable-spiral";
    case FixedPointKind::kUnstableSpiral: return "unstable-spiral";
    case FixedPointKind::kStableNode: return "stable-node";
    case FixedPointKind::kUnstableNode: return "unstable-node";
    case FixedPointKind::kDegenerate: return "degenerate";
  }
  return "unknown";
}

struct FixedPoint {
  double x_star = 0.0;
  FixedPointKind kind = FixedPointKind::kDegenerate;
  double trace = 0.0;
  double det = 0.0;
};

enum class Regime { kOscillatory, kCritical, kCollapsed };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kOscillatory: return "oscillatory";
    case Regime::kCritical: return "critical";
    case Regime::kCollapsed: return "collapsed";
  }
  return "unknown";
}

struct CriticalCheck {
  double ratio = 0.0;           // c/k, m^5
  double critical_ratio = 0.0;  // x0^5/8 for alpha = 4
  Regime regime = Regime::kOscillatory;
};

struct EquilibriumReport {
  std::vector<FixedPoint> fixed_points;  // ascending in x_star
  double ratio = 0.0;
  double critical_ratio = 0.0;
  Regime regime = Regime::kOscillatory;

  // Nearest fixed point strictly on either side of `x`, if any.
  const FixedPoint* left_of(double x) const {
    const FixedPoint* best = nullptr;
    for (const auto& fp : fixed_points)
      if (fp.x_star < x) best = &fp;
    return best;
  }
  const FixedPoint* right_of(double x) const {
    for (const auto& fp : fixed_points)
      if (fp.x_star > x) return &fp;
    return nullptr;
  }
};

struct RootScanConfig {
  std::size_t grid_points = 4096;
  double tol_root = 1e-12;                 // bracket width, m
  double guard = kSingularityGuard;        // excluded distance from each magnet
  double degeneracy_band = 1e-6;           // |det| < band * k  -> degenerate
  double critical_band = 1e-9;             // relative band around the critical ratio
  std::size_t expected_min_roots = 1;      // fewer roots found -> incomplete scan
};

// Fixed-point condition cleared of denominators:
//   c2 |x - x1|^a - c1 |x - x2|^a - k x [|x - x1| |x - x2|]^a
// For even alpha the absolute values are redundant.
inline double equilibrium_residual(double x, const SystemParams& p) {
  if (!(x > -p.x0 && x < p.x0)) throw DomainError("equilibrium_residual: x outside (-x0, x0)");
  const double d1 = detail::ipow(x - p.x1(), p.alpha);  // x - x1 > 0 in the gap
  const double d2 = detail::ipow(p.x2() - x, p.alpha);  // x2 - x > 0 in the gap
  return p.c2 * d1 - p.c1 * d2 - p.k * x * d1 * d2;
}

// Scale used to judge residual magnitudes: k * x0^(2 alpha + 1).
inline double residual_scale(const SystemParams& p) {
  return p.k * detail::ipow(p.x0, 2 * p.alpha + 1);
}

// Jacobian determinant of the unactuated plant at x:
//   k - alpha c2 / (x2 - x)^(a+1) - alpha c1 / (x - x1)^(a+1)
inline double jacobian_det(double x, const SystemParams& p) {
  const double a = static_cast<double>(p.alpha);
  return p.k - a * p.c2 / detail::ipow(p.x2() - x, p.alpha + 1) -
         a * p.c1 / detail::ipow(x - p.x1(), p.alpha + 1);
}

inline FixedPoint classify(double x_star, const SystemParams& p,
                           double degeneracy_band = RootScanConfig{}.degeneracy_band) {
  FixedPoint fp;
  fp.x_star = x_star;
  fp.trace = -p.gamma;
  fp.det = jacobian_det(x_star, p);

  const double band = degeneracy_band * std::max(p.k, 1e-300);
  if (std::abs(fp.det) < band) {
    fp.kind = FixedPointKind::kDegenerate;
  } else if (fp.det < 0.0) {
    fp.kind = FixedPointKind::kSaddle;
  } else if (fp.trace == 0.0) {
    fp.kind = FixedPointKind::kCenter;
  } else {
    const double disc = fp.trace * fp.trace - 4.0 * fp.det;
    const bool stable = fp.trace < 0.0;
    if (disc < 0.0)
      fp.kind = stable ? FixedPointKind::kStableSpiral : FixedPointKind::kUnstableSpiral;
    else
      fp.kind = stable ? FixedPointKind::kStableNode : FixedPointKind::kUnstableNode;
  }
  return fp;
}

// Symmetric trade-off between magnet strength and stiffness: the origin is a
// center iff c/k < x0^5/8 (alpha = 4). For other alpha the threshold
// generalizes to x0^(a+1) / (2 a).
inline CriticalCheck critical_check(const SystemParams& p,
                                    double critical_band = RootScanConfig{}.critical_band) {
  if (!p.symmetric()) throw DomainError("critical_check: requires c1 == c2");
  if (!(p.k > 0.0)) throw DomainError("critical_check: requires k > 0");
  CriticalCheck cc;
  cc.ratio = p.c1 / p.k;
  cc.critical_ratio = detail::ipow(p.x0, p.alpha + 1) / (2.0 * p.alpha);
  if (std::abs(cc.ratio - cc.critical_ratio) < critical_band * cc.critical_ratio)
    cc.regime = Regime::kCritical;
  else if (cc.ratio < cc.critical_ratio)
    cc.regime = Regime::kOscillatory;
  else
    cc.regime = Regime::kCollapsed;
  return cc;
}

namespace detail {

inline double bisect(double lo, double hi, double f_lo, const SystemParams& p, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = equilibrium_residual(mid, p);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// All equilibria in the open gap, found by scanning a uniform grid for sign
// changes of the residual and bisecting each bracket.
inline EquilibriumReport find_fixed_points(const SystemParams& p, const RootScanConfig& cfg = {}) {
  p.validate();
  if (cfg.grid_points < 3) throw IncompleteScanError("find_fixed_points: grid needs >= 3 points");

  const double lo = -p.x0 + cfg.guard;
  const double hi = p.x0 - cfg.guard;
  const std::size_t n = cfg.grid_points;
  const double h = (hi - lo) / static_cast<double>(n - 1);

  std::vector<double> roots;
  double x_prev = lo;
  double f_prev = equilibrium_residual(x_prev, p);
  if (f_prev == 0.0) roots.push_back(x_prev);
  for (std::size_t i = 1; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + static_cast<double>(i) * h;
    const double f = equilibrium_residual(x, p);
    if (f == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && ((f < 0.0) != (f_prev < 0.0))) {
      roots.push_back(detail::bisect(x_prev, x, f_prev, p, cfg.tol_root));
    }
    x_prev = x;
    f_prev = f;
  }

  if (roots.size() < cfg.expected_min_roots) {
    std::ostringstream os;
    os << "find_fixed_points: found " << roots.size() << " roots, expected at least "
       << cfg.expected_min_roots << " (grid of " << n << " points too coarse?)";
    throw IncompleteScanError(os.str());
  }

  EquilibriumReport report;
  std::sort(roots.begin(), roots.end());
  for (double r : roots) report.fixed_points.push_back(classify(r, p, cfg.degeneracy_band));

  if (p.symmetric() && p.k > 0.0) {
    const auto cc = critical_check(p, cfg.critical_band);
    report.ratio = cc.ratio;
    report.critical_ratio = cc.critical_ratio;
    report.regime = cc.regime;
  } else {
    // Asymmetric: regime follows from what the scan found.
    report.ratio = 0.5 * (p.c1 + p.c2) / std::max(p.k, 1e-300);
    report.critical_ratio = detail::ipow(p.x0, p.alpha + 1) / (2.0 * p.alpha);
    const bool has_center = std::any_of(report.fixed_points.begin(), report.fixed_points.end(),
                                        [](const FixedPoint& fp) {
                                          return fp.det > 0.0 &&
                                                 fp.kind != FixedPointKind::kDegenerate;
                                        });
    report.regime = has_center ? Regime::kOscillatory : Regime::kCollapsed;
  }
  return report;
}

// Positive-side saddle of a symmetric oscillatory plant; bounds the amplitude
// of orbits around the center.
inline double saddle_position(const SystemParams& p, const RootScanConfig& cfg = {}) {
  const auto report = find_fixed_points(p, cfg);
  for (const auto& fp : report.fixed_points)
    if (fp.x_star > 0.0 && fp.kind == FixedPointKind::kSaddle) return fp.x_star;
  throw DomainError("saddle_position: no saddle on the positive side (collapsed regime?)");
}

struct AsymmetryRow {
  double delta_c = 0.0;
  double center = 0.0;
  bool has_center = false;
  double saddle_left = 0.0;   // nearest saddle below the center
  double saddle_right = 0.0;  // nearest saddle above the center
  bool has_saddle_left = false;
  bool has_saddle_right = false;
};

// Moves the magnet constants apart, c1 = c - dc/2 and c2 = c + dc/2, and
// records where the center and its flanking saddles end up.
inline std::vector<AsymmetryRow> sweep_asymmetry(const SystemParams& base,
                                                 const std::vector<double>& delta_c_values,
                                                 const RootScanConfig& cfg = {}) {
  if (!base.symmetric()) throw DomainError("sweep_asymmetry: base params must be symmetric");
  std::vector<AsymmetryRow> rows;
  rows.reserve(delta_c_values.size());
  for (double dc : delta_c_values) {
    SystemParams p = base;
    p.c1 = base.c1 - 0.5 * dc;
    p.c2 = base.c2 + 0.5 * dc;
    if (!(p.c1 > 0.0) || !(p.c2 > 0.0))
      throw DomainError("sweep_asymmetry: delta_c makes a magnet constant non-positive");

    const auto report = find_fixed_points(p, cfg);
    AsymmetryRow row;
    row.delta_c = dc;
    // The center closest to the origin.
    for (const auto& fp : report.fixed_points) {
      if (fp.det > 0.0 && fp.kind != FixedPointKind::kDegenerate &&
          (!row.has_center || std::abs(fp.x_star) < std::abs(row.center))) {
        row.center = fp.x_star;
        row.has_center = true;
      }
    }
    if (row.has_center) {
      if (const auto* l = report.left_of(row.center); l && l->kind == FixedPointKind::kSaddle) {
        row.saddle_left = l->x_star;
        row.has_saddle_left = true;
      }
      if (const auto* r = report.right_of(row.center); r && r->kind == FixedPointKind::kSaddle) {
        row.saddle_right = r->x_star;
        row.has_saddle_right = true;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace finact
