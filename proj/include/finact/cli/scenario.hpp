#pragma once

// Scenario files: one JSON document describing the plant and what to run.
//
//   {
//     "plant":     { "normalized": {"c": 2.919e-9, "k": 439.3, "x0": 0.01} }
//                | { "physical": {"C": 2.46e-10, "K": 37.03, "m": 0.0843}, "x0": 0.01 },
//     "run":       { "max_time": 10, "initial_conditions": [[0.002, 0]] },
//     "freqtable": { "count": 32, "lo": 0.05, "hi": 0.95, "horizon": 40 },
//     "control":   { "amplitude_fraction": 0.8, "Q": 0.0, "ic_fractions": [1, 0.5, 1.25] },
//     "design":    { "magnet": {...}, "beam": {...}, "mass": 0.0843, "Q_values": [...] },
//     "sweep":     { "kind": "asymmetry", "delta_c_fractions": [0, 0.05, 0.1, 0.2] }
//   }
//
// Every section except "plant" is optional.

#include <json.hpp>

#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "finact/control.hpp"
#include "finact/design.hpp"

namespace finact::cli {

using nlohmann::json;

struct FreqTableSection {
  std::size_t count = 32;
  double lo = 0.05;
  double hi = 0.95;
  double horizon = 40.0;
  std::size_t pad_factor = 8;
};

struct ControlSection {
  std::optional<double> amplitude;           // m
  double amplitude_fraction = 0.8;           // of the saddle position, if amplitude unset
  std::optional<double> Q;                   // overrides plant gamma
  std::optional<double> gamma;
  std::optional<PidGains> gains;             // default_gains(k) if unset
  std::vector<double> ic_fractions{1.0, 0.5, 1.25};  // x(0) = f * A, v(0) = 0
  double periods = 20.0;                     // horizon in reference periods
};

struct DesignSection {
  MagnetSpec magnet{};
  BeamSpec beam{};
  double mass = 0.0843;
  std::optional<double> C;  // overrides magnet_constant(magnet) for the plant
  double I_max = 20e-3;
  double A_turn = SolenoidSpec{}.A_turn;
  std::vector<double> Q_values{0.0, 0.05, 0.1, 0.2, 0.5};
  double amplitude_fraction = 0.8;
  // Explicit sizing points (F_m in newtons at x_m) bypassing the Q sweep.
  std::vector<std::pair<double, double>> forces;
};

enum class SweepKind { kAsymmetry, kDamping };

struct SweepSection {
  SweepKind kind = SweepKind::kAsymmetry;
  std::vector<double> delta_c_fractions{0.0, 0.05, 0.1, 0.2};
  std::vector<double> Q_values{0.0, 0.05, 0.1, 0.2, 0.5};
  double amplitude_fraction = 0.8;
};

struct Scenario {
  SystemParams params;
  std::optional<PhysicalParams> physical;
  IntegratorConfig run{};
  std::vector<State> initial_conditions;
  std::vector<double> ic_fractions;  // of the saddle position, v = 0
  FreqTableSection freqtable;
  ControlSection control;
  DesignSection design;
  SweepSection sweep;
  std::string format = "csv";
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(where + "/" + key + ": unknown key");
  }
}

inline const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  return j;
}

inline double number(const json& obj, const std::string& where, const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "/" + key + ": expected a number");
  return v.get<double>();
}

inline void read(const json& obj, const std::string& where, const char* key, double& out) {
  if (obj.contains(key)) out = number(obj, where, key);
}

inline void read(const json& obj, const std::string& where, const char* key, std::optional<double>& out) {
  if (obj.contains(key)) out = number(obj, where, key);
}

inline void read(const json& obj, const std::string& where, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(where + "/" + key + ": expected a non-negative integer");
  out = v.get<std::size_t>();
}

inline void read(const json& obj, const std::string& where, const char* key, std::vector<double>& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(where + "/" + key + ": expected an array of numbers");
  out.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      throw ConfigError(where + "/" + key + "/" + std::to_string(i) + ": expected a number");
    out.push_back(v[i].get<double>());
  }
}

inline void parse_plant(const json& j, Scenario& s) {
  const std::string where = "/plant";
  require_object(j, where);
  reject_unknown(j, where, {"normalized", "physical", "x0", "alpha", "cs"});
  const bool has_norm = j.contains("normalized");
  const bool has_phys = j.contains("physical");
  if (has_norm == has_phys)
    throw ConfigError(where + ": exactly one of \"normalized\" or \"physical\" is required");

  SystemParams geom;
  read(j, where, "x0", geom.x0);
  read(j, where, "cs", geom.cs);
  if (j.contains("alpha")) {
    if (!j.at("alpha").is_number_integer()) throw ConfigError(where + "/alpha: expected an integer");
    geom.alpha = j.at("alpha").get<int>();
  }

  if (has_norm) {
    const std::string w = where + "/normalized";
    const auto& n = require_object(j.at("normalized"), w);
    reject_unknown(n, w, {"c", "c1", "c2", "k", "gamma", "x0", "alpha", "cs"});
    SystemParams p = geom;
    if (n.contains("c")) {
      if (n.contains("c1") || n.contains("c2")) throw ConfigError(w + ": give either c or c1/c2");
      p.c1 = p.c2 = number(n, w, "c");
    } else {
      read(n, w, "c1", p.c1);
      read(n, w, "c2", p.c2);
    }
    if (!n.contains("k")) throw ConfigError(w + "/k: required");
    p.k = number(n, w, "k");
    read(n, w, "gamma", p.gamma);
    read(n, w, "x0", p.x0);
    read(n, w, "cs", p.cs);
    if (n.contains("alpha")) {
      if (!n.at("alpha").is_number_integer()) throw ConfigError(w + "/alpha: expected an integer");
      p.alpha = n.at("alpha").get<int>();
    }
    s.params = p;
  } else {
    const std::string w = where + "/physical";
    const auto& ph = require_object(j.at("physical"), w);
    reject_unknown(ph, w, {"C", "C1", "C2", "K", "Gamma", "m"});
    PhysicalParams pp;
    if (ph.contains("C")) {
      if (ph.contains("C1") || ph.contains("C2")) throw ConfigError(w + ": give either C or C1/C2");
      pp.C1 = pp.C2 = number(ph, w, "C");
    } else {
      read(ph, w, "C1", pp.C1);
      read(ph, w, "C2", pp.C2);
    }
    if (!ph.contains("K")) throw ConfigError(w + "/K: required");
    if (!ph.contains("m")) throw ConfigError(w + "/m: required");
    pp.K = number(ph, w, "K");
    pp.m = number(ph, w, "m");
    read(ph, w, "Gamma", pp.Gamma);
    try {
      s.params = normalize(pp, geom);
    } catch (const DomainError& e) {
      throw ConfigError(w + ": " + e.what());
    }
    s.physical = pp;
  }
  try {
    s.params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline void parse_run(const json& j, Scenario& s) {
  const std::string where = "/run";
  require_object(j, where);
  reject_unknown(j, where, {"method", "dt", "rtol", "atol", "max_time", "sample_interval",
                            "initial_conditions", "ic_fractions"});
  auto& r = s.run;
  if (j.contains("method")) {
    const auto& m = j.at("method");
    if (m == "adaptive") r.method = Method::kAdaptive;
    else if (m == "rk4") r.method = Method::kRk4;
    else throw ConfigError(where + "/method: expected \"adaptive\" or \"rk4\"");
  }
  read(j, where, "dt", r.dt);
  read(j, where, "rtol", r.rtol);
  read(j, where, "atol", r.atol);
  read(j, where, "max_time", r.max_time);
  read(j, where, "sample_interval", r.sample_interval);
  try {
    r.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (j.contains("initial_conditions")) {
    const auto& ics = j.at("initial_conditions");
    if (!ics.is_array()) throw ConfigError(where + "/initial_conditions: expected an array of [x, v]");
    for (std::size_t i = 0; i < ics.size(); ++i) {
      const auto& ic = ics[i];
      const std::string w = where + "/initial_conditions/" + std::to_string(i);
      if (!ic.is_array() || ic.size() != 2 || !ic[0].is_number() || !ic[1].is_number())
        throw ConfigError(w + ": expected [x, v]");
      const State st{ic[0].get<double>(), ic[1].get<double>()};
      if (!(st.x > -s.params.x0 && st.x < s.params.x0))
        throw ConfigError(w + ": x must lie inside (-x0, x0)");
      s.initial_conditions.push_back(st);
    }
  }
  read(j, where, "ic_fractions", s.ic_fractions);
}

inline void parse_freqtable(const json& j, Scenario& s) {
  const std::string where = "/freqtable";
  require_object(j, where);
  reject_unknown(j, where, {"count", "lo", "hi", "horizon", "pad_factor"});
  auto& f = s.freqtable;
  read(j, where, "count", f.count);
  read(j, where, "lo", f.lo);
  read(j, where, "hi", f.hi);
  read(j, where, "horizon", f.horizon);
  read(j, where, "pad_factor", f.pad_factor);
  if (f.count < 2) throw ConfigError(where + "/count: need at least 2 amplitudes");
  if (!(f.lo > 0.0 && f.lo < f.hi && f.hi < 1.0))
    throw ConfigError(where + ": need 0 < lo < hi < 1 (fractions of the saddle position)");
  if (!(f.horizon > 0.0)) throw ConfigError(where + "/horizon: must be > 0");
}

inline void parse_gains(const json& j, const std::string& where, std::optional<PidGains>& out) {
  require_object(j, where);
  reject_unknown(j, where, {"kp", "kd", "ki"});
  PidGains g;
  read(j, where, "kp", g.kp);
  read(j, where, "kd", g.kd);
  read(j, where, "ki", g.ki);
  out = g;
}

inline void parse_control(const json& j, Scenario& s) {
  const std::string where = "/control";
  require_object(j, where);
  reject_unknown(j, where, {"amplitude", "amplitude_fraction", "Q", "gamma", "gains", "ic_fractions", "periods"});
  auto& c = s.control;
  read(j, where, "amplitude", c.amplitude);
  read(j, where, "amplitude_fraction", c.amplitude_fraction);
  read(j, where, "Q", c.Q);
  read(j, where, "gamma", c.gamma);
  if (c.Q && c.gamma) throw ConfigError(where + ": give either Q or gamma");
  if (c.Q && !(*c.Q >= 0.0)) throw ConfigError(where + "/Q: must be >= 0");
  if (c.gamma && !(*c.gamma >= 0.0)) throw ConfigError(where + "/gamma: must be >= 0");
  if (c.amplitude && !(*c.amplitude > 0.0)) throw ConfigError(where + "/amplitude: must be > 0");
  if (!(c.amplitude_fraction > 0.0)) throw ConfigError(where + "/amplitude_fraction: must be > 0");
  if (j.contains("gains")) parse_gains(j.at("gains"), where + "/gains", c.gains);
  read(j, where, "ic_fractions", c.ic_fractions);
  read(j, where, "periods", c.periods);
  if (!(c.periods > 0.0)) throw ConfigError(where + "/periods: must be > 0");
}

inline void parse_design(const json& j, Scenario& s) {
  const std::string where = "/design";
  require_object(j, where);
  reject_unknown(j, where, {"magnet", "beam", "mass", "C", "solenoid", "Q_values", "amplitude_fraction", "forces"});
  auto& d = s.design;
  if (j.contains("magnet")) {
    const std::string w = where + "/magnet";
    const auto& m = require_object(j.at("magnet"), w);
    reject_unknown(m, w, {"Br", "R", "ell"});
    read(m, w, "Br", d.magnet.Br);
    read(m, w, "R", d.magnet.R);
    read(m, w, "ell", d.magnet.ell);
  }
  if (j.contains("beam")) {
    const std::string w = where + "/beam";
    const auto& b = require_object(j.at("beam"), w);
    reject_unknown(b, w, {"E", "width", "thickness", "L", "y"});
    read(b, w, "E", d.beam.E);
    read(b, w, "width", d.beam.width);
    read(b, w, "thickness", d.beam.thickness);
    read(b, w, "L", d.beam.L);
    read(b, w, "y", d.beam.y);
  }
  if (j.contains("solenoid")) {
    const std::string w = where + "/solenoid";
    const auto& so = require_object(j.at("solenoid"), w);
    reject_unknown(so, w, {"I_max", "A_turn"});
    read(so, w, "I_max", d.I_max);
    read(so, w, "A_turn", d.A_turn);
  }
  read(j, where, "mass", d.mass);
  read(j, where, "C", d.C);
  read(j, where, "Q_values", d.Q_values);
  read(j, where, "amplitude_fraction", d.amplitude_fraction);
  if (j.contains("forces")) {
    const auto& f = j.at("forces");
    if (!f.is_array()) throw ConfigError(where + "/forces: expected an array of [F_m, x_m]");
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!f[i].is_array() || f[i].size() != 2 || !f[i][0].is_number() || !f[i][1].is_number())
        throw ConfigError(where + "/forces/" + std::to_string(i) + ": expected [F_m, x_m]");
      d.forces.emplace_back(f[i][0].get<double>(), f[i][1].get<double>());
    }
  }
  try {
    d.magnet.validate();
    d.beam.validate();
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (!(d.mass > 0.0)) throw ConfigError(where + "/mass: must be > 0");
  if (!(d.I_max > 0.0)) throw ConfigError(where + "/solenoid/I_max: must be > 0");
  if (!(d.A_turn > 0.0)) throw ConfigError(where + "/solenoid/A_turn: must be > 0");
  for (double q : d.Q_values)
    if (!(q >= 0.0)) throw ConfigError(where + "/Q_values: entries must be >= 0");
}

inline void parse_sweep(const json& j, Scenario& s) {
  const std::string where = "/sweep";
  require_object(j, where);
  reject_unknown(j, where, {"kind", "delta_c_fractions", "Q_values", "amplitude_fraction"});
  auto& sw = s.sweep;
  if (j.contains("kind")) {
    const auto& k = j.at("kind");
    if (k == "asymmetry") sw.kind = SweepKind::kAsymmetry;
    else if (k == "damping") sw.kind = SweepKind::kDamping;
    else throw ConfigError(where + "/kind: expected \"asymmetry\" or \"damping\"");
  }
  read(j, where, "delta_c_fractions", sw.delta_c_fractions);
  read(j, where, "Q_values", sw.Q_values);
  read(j, where, "amplitude_fraction", sw.amplitude_fraction);
}

// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace detail

inline Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ConfigError("/: expected a JSON object");
  detail::reject_unknown(j, "", {"plant", "run", "freqtable", "control", "design", "sweep", "outputs"});
  if (!j.contains("plant")) throw ConfigError("/plant: required");
  Scenario s;
  try {
    detail::parse_plant(j.at("plant"), s);
    if (j.contains("run")) detail::parse_run(j.at("run"), s);
    if (j.contains("freqtable")) detail::parse_freqtable(j.at("freqtable"), s);
    if (j.contains("control")) detail::parse_control(j.at("control"), s);
    if (j.contains("design")) detail::parse_design(j.at("design"), s);
    if (j.contains("sweep")) detail::parse_sweep(j.at("sweep"), s);
    if (j.contains("outputs")) {
      const auto& o = detail::require_object(j.at("outputs"), "/outputs");
      detail::reject_unknown(o, "/outputs", {"format"});
      if (o.contains("format")) {
        if (o.at("format") != "csv" && o.at("format") != "json")
          throw ConfigError("/outputs/format: expected \"csv\" or \"json\"");
        s.format = o.at("format").get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("type error: ") + e.what());
  }
  return s;
}

inline Scenario parse_scenario_text(const std::string& text, const std::string& name = "<config>") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_col(text, e.byte);
    std::ostringstream os;
    os << name << ":" << line << ":" << col << ": " << e.what();
    throw ConfigError(os.str());
  }
  try {
    return parse_scenario(j);
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace finact::cli
