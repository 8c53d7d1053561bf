#pragma once

// Orbit frequency estimation and the amplitude -> natural frequency table
// used to pick the controller's reference frequency.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "finact/equilibria.hpp"
#include "finact/sim.hpp"

namespace finact {

// Single-sided power spectrum, normalized so that power sums to 1 (or all
// zeros for a constant signal).
struct Spectrum {
  std::vector<double> frequencies;  // Hz, uniformly spaced from 0
  std::vector<double> power;
  double bin_width = 0.0;

  bool is_zero() const {
    return std::all_of(power.begin(), power.end(), [](double p) { return p == 0.0; });
  }
};

struct FrequencyTableEntry {
  double amplitude = 0.0;  // m
  double frequency = 0.0;  // Hz
};

struct FrequencyTable {
  std::vector<FrequencyTableEntry> entries;  // strictly increasing amplitude

  double min_amplitude() const { return entries.front().amplitude; }
  double max_amplitude() const { return entries.back().amplitude; }
};

namespace detail {

// The FFTW planner is not reentrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace detail

// Power spectrum of a uniformly sampled series. The mean is removed and the
// record is zero-padded to pad_factor times its length before the transform
// (rectangular window), which only refines the frequency grid.
inline Spectrum power_spectrum(std::span<const double> samples, double sample_interval,
                               std::size_t pad_factor = 8) {
  if (samples.size() < 4) throw DomainError("power_spectrum: need at least 4 samples");
  if (!(sample_interval > 0.0)) throw DomainError("power_spectrum: sample_interval must be > 0");
  pad_factor = std::max<std::size_t>(pad_factor, 1);

  const std::size_t n = samples.size();
  const std::size_t nfft = n * pad_factor;
  const std::size_t nbins = nfft / 2 + 1;

  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(n);

  double max_dev = 0.0;
  for (double s : samples) max_dev = std::max(max_dev, std::abs(s - mean));
  // The mean of a constant record is not exact in floating point.
  const bool constant =
      std::all_of(samples.begin(), samples.end(), [&](double v) { return v == samples.front(); }) ||
      max_dev <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(mean);

  Spectrum out;
  out.bin_width = 1.0 / (static_cast<double>(nfft) * sample_interval);
  out.frequencies.resize(nbins);
  for (std::size_t i = 0; i < nbins; ++i) out.frequencies[i] = static_cast<double>(i) * out.bin_width;
  out.power.assign(nbins, 0.0);
  if (constant || max_dev == 0.0) return out;

  std::unique_ptr<double, detail::FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * nfft)));
  std::unique_ptr<fftw_complex, detail::FftwFree> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nbins)));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), in.get(), spec.get(), FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) in.get()[i] = samples[i] - mean;
  std::fill(in.get() + n, in.get() + nfft, 0.0);
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < nbins; ++i) {
    const double re = spec.get()[i][0];
    const double im = spec.get()[i][1];
    // Interior bins carry the mirrored negative-frequency half as well.
    const bool edge = (i == 0) || (nfft % 2 == 0 && i == nbins - 1);
    out.power[i] = (edge ? 1.0 : 2.0) * (re * re + im * im);
    total += out.power[i];
  }
  for (double& pw : out.power) pw /= total;
  return out;
}

// Spectrum of the displacement series of a uniformly sampled trajectory.
inline Spectrum power_spectrum(const Trajectory& traj, std::size_t pad_factor = 8) {
  if (traj.size() < 4) throw DomainError("power_spectrum: trajectory too short");
  const double dt = traj.times[1] - traj.times[0];
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double step = traj.times[i] - traj.times[i - 1];
    if (std::abs(step - dt) > 1e-9 * dt)
      throw DomainError("power_spectrum: trajectory is not uniformly sampled");
  }
  std::vector<double> x(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) x[i] = traj.states[i].x;
  return power_spectrum(x, dt, pad_factor);
}

// Frequency of the fundamental: the lowest local maximum holding at least
// `strong_fraction` of the peak power, refined by a parabola through the
// three bins around it.
inline double dominant_frequency(const Spectrum& s, double strong_fraction = 0.25) {
  const std::size_t n = s.power.size();
  if (n < 3 || s.is_zero()) throw DomainError("dominant_frequency: spectrum is zero");

  std::size_t imax = 1;
  for (std::size_t i = 1; i < n; ++i)
    if (s.power[i] > s.power[imax]) imax = i;

  std::size_t peak = imax;
  const double threshold = strong_fraction * s.power[imax];
  for (std::size_t i = 1; i + 1 < n && i < imax; ++i) {
    if (s.power[i] >= threshold && s.power[i] >= s.power[i - 1] && s.power[i] >= s.power[i + 1]) {
      peak = i;
      break;
    }
  }

  double offset = 0.0;
  if (peak >= 1 && peak + 1 < n) {
    const double a = s.power[peak - 1];
    const double b = s.power[peak];
    const double c = s.power[peak + 1];
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
  }
  return (static_cast<double>(peak) + offset) * s.bin_width;
}

struct FrequencyTableConfig {
  double horizon = 40.0;  // s of simulated motion per amplitude
  std::size_t pad_factor = 8;
  IntegratorConfig integrator{};  // max_time is overridden by horizon
};

// `count` amplitudes spaced uniformly over [lo, hi] x saddle.
inline std::vector<double> table_amplitudes(double saddle, std::size_t count = 32, double lo = 0.05,
                                            double hi = 0.95) {
  if (count < 2) throw DomainError("table_amplitudes: need at least 2 amplitudes");
  std::vector<double> a(count);
  for (std::size_t i = 0; i < count; ++i)
    a[i] = saddle * (lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return a;
}

// Natural frequency of the undamped, unactuated orbit through (a, 0) for each
// amplitude a. Amplitudes must be increasing and lie inside the saddle region.
inline FrequencyTable build_frequency_table(const SystemParams& params,
                                            const std::vector<double>& amplitudes,
                                            const FrequencyTableConfig& cfg = {}) {
  SystemParams p = params;
  p.gamma = 0.0;
  p.validate();
  if (amplitudes.empty()) throw DomainError("build_frequency_table: no amplitudes");

  // Upper bound on amplitude: the nearest positive saddle, or the guard band
  // when no saddle exists (e.g. a pure spring).
  double bound = p.x0 - kSingularityGuard;
  for (const auto& fp : find_fixed_points(p).fixed_points)
    if (fp.x_star > 0.0 && fp.kind == FixedPointKind::kSaddle) {
      bound = fp.x_star;
      break;
    }

  IntegratorConfig icfg = cfg.integrator;
  icfg.max_time = cfg.horizon;

  FrequencyTable table;
  table.entries.reserve(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double a = amplitudes[i];
    if (!(a > 0.0)) throw DomainError("build_frequency_table: amplitudes must be > 0");
    if (a >= bound) throw DomainError("build_frequency_table: amplitude at or beyond the saddle");
    if (i > 0 && !(a > amplitudes[i - 1]))
      throw DomainError("build_frequency_table: amplitudes must be strictly increasing");

    const Trajectory traj = integrate(p, State{a, 0.0}, icfg);
    if (traj.terminated_early())
      throw DomainError("build_frequency_table: orbit left the basin during table construction");
    table.entries.push_back({a, dominant_frequency(power_spectrum(traj, cfg.pad_factor))});
  }
  return table;
}

// Linear interpolation in the table.
inline double lookup(const FrequencyTable& table, double amplitude) {
  if (table.entries.empty()) throw DomainError("lookup: empty table");
  if (!(amplitude >= table.min_amplitude() && amplitude <= table.max_amplitude()))
    throw DomainError("lookup: amplitude outside table range");
  const auto& e = table.entries;
  auto it = std::lower_bound(e.begin(), e.end(), amplitude,
                             [](const FrequencyTableEntry& en, double a) { return en.amplitude < a; });
  if (it->amplitude == amplitude) return it->frequency;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double w = (amplitude - lo.amplitude) / (hi.amplitude - lo.amplitude);
  return lo.frequency + w * (hi.frequency - lo.frequency);
}

}  // namespace finact
