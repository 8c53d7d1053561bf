#pragma once

// Subcommands of the finact tool. Each writes its artifacts into an output
// directory and returns the paths it wrote. Errors surface as exceptions and
// are mapped to exit codes by exit_code_for().

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "finact/cli/scenario.hpp"

namespace finact::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

struct OutputOptions {
  std::filesystem::path out_dir = ".";
  std::string format = "csv";  // trajectories and tables: csv | json
  bool meta = true;            // add a generated_at block to JSON reports
};

// Shortest decimal text that parses back to the same double.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("write failed: " + path.string());
}

inline json meta_block() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return {{"tool", "finact"}, {"version", kVersion}, {"generated_at", os.str()}};
}

inline std::string dump_report(json report, const OutputOptions& opt) {
  if (opt.meta) report["meta"] = meta_block();
  return report.dump(2) + "\n";
}

inline json params_json(const SystemParams& p) {
  return {{"c1", p.c1}, {"c2", p.c2}, {"k", p.k}, {"gamma", p.gamma},
          {"x0", p.x0}, {"alpha", p.alpha}, {"cs", p.cs}};
}

inline std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,x,v,f_control,current\n";
  out.reserve(tr.size() * 64);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out += fmt(tr.times[i]);
    out += ',';
    out += fmt(tr.states[i].x);
    out += ',';
    out += fmt(tr.states[i].v);
    out += ',';
    out += fmt(tr.drive[i].force);
    out += ',';
    out += fmt(tr.drive[i].current);
    out += '\n';
  }
  for (const auto& e : tr.events) {
    out += "# event,";
    out += to_string(e.kind);
    out += ',';
    out += fmt(e.t);
    out += '\n';
  }
  return out;
}

inline json events_json(const Trajectory& tr) {
  json ev = json::array();
  for (const auto& e : tr.events) ev.push_back({{"t", e.t}, {"kind", std::string(to_string(e.kind))}});
  return ev;
}

inline std::string trajectory_json(const Trajectory& tr) {
  json t = json::array(), x = json::array(), v = json::array(), f = json::array(), c = json::array();
  for (std::size_t i = 0; i < tr.size(); ++i) {
    t.push_back(tr.times[i]);
    x.push_back(tr.states[i].x);
    v.push_back(tr.states[i].v);
    f.push_back(tr.drive[i].force);
    c.push_back(tr.drive[i].current);
  }
  json j = {{"t", t}, {"x", x}, {"v", v}, {"f_control", f}, {"current", c}, {"events", events_json(tr)}};
  return j.dump() + "\n";
}

// Rows of numbers under a header, as CSV or as a JSON array of objects.
inline std::string table_text(const std::vector<std::string>& header,
                              const std::vector<std::vector<double>>& rows, const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      json o = json::object();
      for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
      arr.push_back(o);
    }
    return arr.dump(2) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += std::isnan(r[i]) ? std::string() : fmt(r[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string ext(const OutputOptions& opt) { return opt.format == "json" ? ".json" : ".csv"; }

inline double saddle_or_config_error(const SystemParams& p) {
  try {
    return saddle_position(p);
  } catch (const DomainError&) {
    throw ConfigError("plant has no saddle on the positive side (collapsed regime); "
                      "amplitude-based commands need an oscillatory plant");
  }
}

inline FrequencyTable table_for(const SystemParams& p, const Scenario& s, double saddle) {
  FrequencyTableConfig cfg;
  cfg.horizon = s.freqtable.horizon;
  cfg.pad_factor = s.freqtable.pad_factor;
  cfg.integrator = s.run;
  return build_frequency_table(p, table_amplitudes(saddle, s.freqtable.count, s.freqtable.lo, s.freqtable.hi),
                               cfg);
}

// Reference amplitude, validated against the saddle bound and the table range.
inline double resolve_amplitude(std::optional<double> absolute, double fraction, double saddle,
                                const FreqTableSection& ft) {
  const double A = absolute ? *absolute : fraction * saddle;
  if (!(A < saddle)) {
    std::ostringstream os;
    os << "reference amplitude " << A << " m exceeds the saddle position " << saddle
       << " m (the bound on orbit amplitude)";
    throw ConfigError(os.str());
  }
  if (A < ft.lo * saddle || A > ft.hi * saddle) {
    std::ostringstream os;
    os << "reference amplitude " << A << " m outside the frequency table range [" << ft.lo * saddle << ", "
       << ft.hi * saddle << "] m";
    throw ConfigError(os.str());
  }
  return A;
}

struct TrackingRun {
  Trajectory traj;
  ReferencePlan plan;
  State ic;
};

inline TrackingRun run_tracking(const SystemParams& p, const PidGains& g, double A, const State& ic,
                                const FrequencyTable& table, const IntegratorConfig& base, double periods) {
  TrackingRun run;
  run.ic = ic;
  run.plan = plan_reference(A, p, ic, table);
  IntegratorConfig cfg = base;
  cfg.max_time = periods * run.plan.period();
  run.traj = closed_loop(p, g, run.plan, ic, cfg);
  if (run.traj.terminated_early()) {
    std::ostringstream os;
    os << "closed-loop run from x(0)=" << ic.x << " ended early (" << to_string(run.traj.events.front().kind)
       << " at t=" << run.traj.events.front().t << " s)";
    throw SingularityError(os.str());
  }
  return run;
}

inline double steady_amplitude(const TrackingRun& run) {
  const double T = run.plan.period();
  const double t_end = run.traj.times.back();
  return amplitude_between(run.traj, t_end - T, t_end);
}

}  // namespace detail

inline std::vector<std::filesystem::path> cmd_analyze(const Scenario& s, const OutputOptions& opt) {
  const auto report = find_fixed_points(s.params);
  json fps = json::array();
  for (const auto& fp : report.fixed_points) {
    fps.push_back({{"x_star", fp.x_star},
                   {"kind", std::string(to_string(fp.kind))},
                   {"trace", fp.trace},
                   {"det", fp.det},
                   {"residual", equilibrium_residual(fp.x_star, s.params)}});
  }
  json j = {{"params", detail::params_json(s.params)},
            {"fixed_points", fps},
            {"count", report.fixed_points.size()},
            {"ratio", report.ratio},
            {"critical_ratio", report.critical_ratio},
            {"regime", std::string(to_string(report.regime))},
            {"symmetric", s.params.symmetric()}};
  const auto path = opt.out_dir / "analyze.json";
  detail::write_file(path, detail::dump_report(j, opt));
  return {path};
}

inline std::vector<std::filesystem::path> cmd_simulate(const Scenario& s, const OutputOptions& opt) {
  std::vector<State> ics = s.initial_conditions;
  if (!s.ic_fractions.empty()) {
    const double xs = detail::saddle_or_config_error(s.params);
    for (double f : s.ic_fractions) ics.push_back({f * xs, 0.0});
  }
  if (ics.empty()) throw ConfigError("/run: simulate needs initial_conditions or ic_fractions");

  std::vector<std::filesystem::path> written;
  json runs = json::array();
  for (std::size_t i = 0; i < ics.size(); ++i) {
    if (!(ics[i].x > -s.params.x0 && ics[i].x < s.params.x0))
      throw ConfigError("/run: initial condition " + std::to_string(i) + " outside (-x0, x0)");
    const Trajectory tr = integrate(s.params, ics[i], s.run);
    const auto path = opt.out_dir / ("trajectory_" + std::to_string(i) + detail::ext(opt));
    detail::write_file(path, opt.format == "json" ? detail::trajectory_json(tr) : detail::trajectory_csv(tr));
    written.push_back(path);

    double xmax = 0.0;
    for (const auto& st : tr.states) xmax = std::max(xmax, std::abs(st.x));
    runs.push_back({{"ic", {ics[i].x, ics[i].v}},
                    {"samples", tr.size()},
                    {"t_end", tr.times.back()},
                    {"max_abs_x", xmax},
                    {"events", detail::events_json(tr)},
                    {"file", path.filename().string()}});
  }
  json j = {{"params", detail::params_json(s.params)}, {"runs", runs}};
  const auto path = opt.out_dir / "simulate.json";
  detail::write_file(path, detail::dump_report(j, opt));
  written.push_back(path);
  return written;
}

inline std::vector<std::filesystem::path> cmd_freqtable(const Scenario& s, const OutputOptions& opt) {
  // Without magnets (or with ones too weak to make saddles) every orbit up to
  // the guard band is bounded, so the table spans the whole gap.
  const auto report = find_fixed_points(s.params);
  const bool unbounded = report.fixed_points.size() == 1 && report.fixed_points[0].kind == FixedPointKind::kCenter;
  const double xs = unbounded ? s.params.x0 - s.run.guard : detail::saddle_or_config_error(s.params);
  const auto table = detail::table_for(s.params, s, xs);
  std::vector<std::vector<double>> rows;
  for (const auto& e : table.entries) rows.push_back({e.amplitude, e.amplitude / xs, e.frequency});
  const auto path = opt.out_dir / ("freqtable" + detail::ext(opt));
  detail::write_file(path, detail::table_text({"amplitude", "amplitude_fraction", "frequency"}, rows, opt.format));
  return {path};
}

inline SystemParams control_plant(const Scenario& s) {
  SystemParams p = s.params;
  if (s.control.Q) p.gamma = damping_from_Q(*s.control.Q, p.k);
  if (s.control.gamma) p.gamma = *s.control.gamma;
  return p;
}

inline std::vector<std::filesystem::path> cmd_control(const Scenario& s, const OutputOptions& opt) {
  const SystemParams p = control_plant(s);
  const double xs = detail::saddle_or_config_error(p);
  const double A = detail::resolve_amplitude(s.control.amplitude, s.control.amplitude_fraction, xs, s.freqtable);
  const auto table = detail::table_for(p, s, xs);
  const PidGains g = s.control.gains.value_or(default_gains(p.k));

  std::vector<std::filesystem::path> written;
  json runs = json::array();
  for (std::size_t i = 0; i < s.control.ic_fractions.size(); ++i) {
    const State ic{s.control.ic_fractions[i] * A, 0.0};
    // Starts past the saddle are allowed; the controller may still pull them back.
    if (!(std::abs(ic.x) < p.x0 - s.run.guard))
      throw ConfigError("/control/ic_fractions/" + std::to_string(i) + ": x(0) outside the magnet gap");
    const auto run = detail::run_tracking(p, g, A, ic, table, s.run, s.control.periods);
    const auto path = opt.out_dir / ("control_" + std::to_string(i) + detail::ext(opt));
    detail::write_file(path, opt.format == "json" ? detail::trajectory_json(run.traj)
                                                  : detail::trajectory_csv(run.traj));
    written.push_back(path);
    const auto peak = max_control_force(run.traj);
    runs.push_back({{"ic", {ic.x, ic.v}},
                    {"phase", run.plan.phase},
                    {"steady_amplitude", detail::steady_amplitude(run)},
                    {"max_abs_force", peak.force},
                    {"x_at_max_force", peak.displacement},
                    {"mean_abs_force", mean_abs_control_force(run.traj)},
                    {"file", path.filename().string()}});
  }
  json j = {{"params", detail::params_json(p)},
            {"gains", {{"kp", g.kp}, {"kd", g.kd}, {"ki", g.ki}}},
            {"amplitude", A},
            {"saddle", xs},
            {"omega", 2.0 * std::numbers::pi * lookup(table, A)},
            {"frequency", lookup(table, A)},
            {"runs", runs}};
  const auto path = opt.out_dir / "control.json";
  detail::write_file(path, detail::dump_report(j, opt));
  written.push_back(path);
  return written;
}

struct DesignPoint {
  double Q = 0.0;
  double gamma = 0.0;
  double f_max = 0.0;   // per unit mass
  double x_m = 0.0;
  double F_m = 0.0;     // N
  double G = 0.0;
  std::int64_t turns = 0;
};

// Plant implied by the design section: c = C/m, k = K/m, geometry from the
// plant block.
inline SystemParams design_plant(const Scenario& s) {
  PhysicalParams pp;
  pp.C1 = pp.C2 = s.design.C.value_or(magnet_constant(s.design.magnet));
  pp.K = beam_stiffness(s.design.beam);
  pp.m = s.design.mass;
  return normalize(pp, s.params);
}

// Peak controller force and turn count for each damping ratio, tracking
// A = amplitude_fraction * saddle from the on-orbit start (A, 0).
inline std::vector<DesignPoint> design_q_sweep(const Scenario& s) {
  SystemParams base = design_plant(s);
  base.gamma = 0.0;
  const double xs = detail::saddle_or_config_error(base);
  const double A = detail::resolve_amplitude(std::nullopt, s.design.amplitude_fraction, xs, s.freqtable);
  const auto table = detail::table_for(base, s, xs);
  std::vector<DesignPoint> out;
  for (double Q : s.design.Q_values) {
    SystemParams p = base;
    p.gamma = damping_from_Q(Q, p.k);
    const PidGains g = s.control.gains.value_or(default_gains(p.k));
    const auto run = detail::run_tracking(p, g, A, State{A, 0.0}, table, s.run, s.control.periods);
    const auto peak = max_control_force(run.traj);
    DesignPoint d;
    d.Q = Q;
    d.gamma = p.gamma;
    d.f_max = peak.force;
    d.x_m = peak.displacement;
    d.F_m = peak.force * s.design.mass;
    d.G = solenoid_geometry_factor(d.x_m, p.x0);
    d.turns = solenoid_turns(d.F_m, s.design.I_max, s.design.magnet, s.design.A_turn, d.x_m, p.x0);
    out.push_back(d);
  }
  return out;
}

inline std::vector<std::filesystem::path> cmd_design(const Scenario& s, const OutputOptions& opt) {
  const auto& d = s.design;
  const double C = magnet_constant(d.magnet);
  const double K = beam_stiffness(d.beam);
  const SystemParams p = design_plant(s);

  json q_rows = json::array();
  for (const auto& pt : design_q_sweep(s)) {
    q_rows.push_back({{"Q", pt.Q}, {"gamma", pt.gamma}, {"f_max", pt.f_max}, {"x_m", pt.x_m},
                      {"F_m", pt.F_m}, {"G", pt.G}, {"turns", pt.turns}});
  }
  json explicit_rows = json::array();
  for (const auto& [F_m, x_m] : d.forces) {
    explicit_rows.push_back({{"F_m", F_m}, {"x_m", x_m},
                             {"turns", solenoid_turns(F_m, d.I_max, d.magnet, d.A_turn, x_m, p.x0)}});
  }
  json j = {
      {"magnet", {{"Br", d.magnet.Br}, {"R", d.magnet.R}, {"ell", d.magnet.ell}}},
      {"beam", {{"E", d.beam.E}, {"width", d.beam.width}, {"thickness", d.beam.thickness},
                {"L", d.beam.L}, {"y", d.beam.y}, {"I_area", second_moment_of_area(d.beam)}}},
      {"mass", d.mass},
      {"C", C},
      {"C_used", d.C.value_or(C)},
      {"K", K},
      {"c", p.c1},
      {"k", p.k},
      {"gamma_range", {damping_from_Q(0.0, p.k), damping_from_Q(0.5, p.k)}},
      {"solenoid", {{"I_max", d.I_max}, {"A_turn", d.A_turn}}},
      {"q_sweep", q_rows},
      {"explicit", explicit_rows}};
  const auto path = opt.out_dir / "design.json";
  detail::write_file(path, detail::dump_report(j, opt));
  return {path};
}

inline std::vector<std::filesystem::path> cmd_sweep(const Scenario& s, const OutputOptions& opt) {
  const auto path = opt.out_dir / ("sweep" + detail::ext(opt));
  if (s.sweep.kind == SweepKind::kAsymmetry) {
    std::vector<double> dcs;
    for (double f : s.sweep.delta_c_fractions) dcs.push_back(f * s.params.c1);
    const auto rows = sweep_asymmetry(s.params, dcs);
    std::vector<std::vector<double>> out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out.push_back({s.sweep.delta_c_fractions[i], r.delta_c, r.has_center ? r.center : nan,
                     r.has_saddle_left ? r.saddle_left : nan, r.has_saddle_right ? r.saddle_right : nan});
    }
    detail::write_file(path, detail::table_text({"delta_c_fraction", "delta_c", "center", "saddle_left",
                                                 "saddle_right"},
                                                out, opt.format));
    return {path};
  }

  SystemParams base = s.params;
  base.gamma = 0.0;
  const double xs = detail::saddle_or_config_error(base);
  const double A = detail::resolve_amplitude(std::nullopt, s.sweep.amplitude_fraction, xs, s.freqtable);
  const auto table = detail::table_for(base, s, xs);
  std::vector<std::vector<double>> out;
  for (double Q : s.sweep.Q_values) {
    SystemParams p = base;
    p.gamma = damping_from_Q(Q, p.k);
    const PidGains g = s.control.gains.value_or(default_gains(p.k));
    const auto run = detail::run_tracking(p, g, A, State{A, 0.0}, table, s.run, s.control.periods);
    const auto peak = max_control_force(run.traj);
    out.push_back({Q, p.gamma, peak.force, peak.displacement, mean_abs_control_force(run.traj),
                   detail::steady_amplitude(run)});
  }
  detail::write_file(path, detail::table_text({"Q", "gamma", "f_max", "x_m", "mean_abs_f", "steady_amplitude"},
                                              out, opt.format));
  return {path};
}

inline std::vector<std::filesystem::path> run_command(const std::string& name, const Scenario& s,
                                                      const OutputOptions& opt) {
  if (name == "analyze") return cmd_analyze(s, opt);
  if (name == "simulate") return cmd_simulate(s, opt);
  if (name == "freqtable") return cmd_freqtable(s, opt);
  if (name == "control") return cmd_control(s, opt);
  if (name == "design") return cmd_design(s, opt);
  if (name == "sweep") return cmd_sweep(s, opt);
  throw ConfigError("unknown command: " + name);
}

// Maps the in-flight exception to the documented exit code.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const UnsupportedError*>(&e))
    return kExitConfig;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitNumerical;
}

}  // namespace finact::cli
