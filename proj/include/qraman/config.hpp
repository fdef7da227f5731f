#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qraman/errors.hpp"
#include "qraman/molecular_models.hpp"
#include "qraman/numerics/sampled.hpp"
#include "qraman/photon_states.hpp"
#include "qraman/signal_engine.hpp"
#include "qraman/units.hpp"

namespace qraman {

using json = nlohmann::json;

enum class ProbeKind { entangled, fock, classical, pseudo_thermal };
enum class ShiftUnit { eV, wavenumber };
enum class OutputFormat { text, binary };

inline const char* to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::entangled: return "entangled";
    case ProbeKind::fock: return "fock";
    case ProbeKind::classical: return "classical";
    case ProbeKind::pseudo_thermal: return "pseudo-thermal";
  }
  return "?";
}

/// Every probe family's parameters, so one block can be re-targeted to
/// another family (compare-probes).
struct ProbeConfig {
  ProbeKind kind = ProbeKind::entangled;
  EntangledPairParams pair;
  SinglePhotonParams signal;
  SinglePhotonParams idler;
  SinglePhotonParams pulse;
  double jitter = 30.0;

  ProbeState state() const { return as(kind); }
  ProbeState as(ProbeKind k) const {
    switch (k) {
      case ProbeKind::entangled: return EntangledProbe{pair};
      case ProbeKind::fock: return FockProbe{signal, idler};
      case ProbeKind::classical: return ClassicalProbe{pulse};
      case ProbeKind::pseudo_thermal: return PseudoThermalProbe{pair, jitter};
    }
    return EntangledProbe{pair};
  }
};

struct AxisConfig {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const {
    return UniformGrid::linspace(min, max, count).values();
  }
};

struct GridConfig {
  AxisConfig shift;  // in shift_unit
  ShiftUnit shift_unit = ShiftUnit::eV;
  AxisConfig delay;  // fs

  std::vector<double> shift_values_ev() const {
    auto v = shift.values();
    if (shift_unit == ShiftUnit::wavenumber)
      for (double& x : v) x = units::from_wavenumber(x);
    return v;
  }
};

struct OutputConfig {
  std::string directory = "qraman-out";
  OutputFormat format = OutputFormat::text;
  bool normalize = false;
  bool plot_script = true;
};

struct NumericConfig {
  double rel_tol = 1e-10;
  LineshapeMethod method = LineshapeMethod::quadrature;
  double normalization_window = 1.0;  // eV
};

struct RunConfig {
  SignalKind signal = SignalKind::qfrs_intensity;
  bool compare_probes = false;
  ProbeConfig probe;
  MolecularModel model;
  DetectionConfig detection;
  GridConfig grid;
  OutputConfig output;
  NumericConfig numeric;

  EngineOptions engine_options(unsigned threads = 1) const {
    EngineOptions o;
    o.rel_tol = numeric.rel_tol;
    o.method = numeric.method;
    o.normalization_window = numeric.normalization_window;
    o.threads = threads;
    return o;
  }
};

namespace config_detail {

inline std::string join(const std::string& path, std::string_view key) {
  return path + "/" + std::string(key);
}

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(join(path, key), "unknown key");
  }
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return std::string(s);
}

/// Splits "2914 cm^-1" into (2914, "cm^-1").
inline std::pair<double, std::string> split_quantity(const std::string& text,
                                                     const std::string& path) {
  const std::string s = trim(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || !std::isfinite(v))
    throw SchemaError(path, "cannot parse quantity '" + text + "'");
  return {v, trim(std::string_view(end))};
}

enum class Dimension { energy, time, rate, phase, plain };

inline double convert(double v, const std::string& unit, Dimension dim,
                      const std::string& path) {
  switch (dim) {
    case Dimension::energy:
      if (unit.empty() || unit == "eV") return v;
      if (unit == "meV") return v * 1e-3;
      if (unit == "cm^-1" || unit == "cm-1" || unit == "1/cm")
        return units::from_wavenumber(v);
      break;
    case Dimension::time:
      if (unit.empty() || unit == "fs") return v;
      if (unit == "ps") return units::from_ps(v);
      break;
    case Dimension::rate:
      if (unit.empty() || unit == "fs^-2") return v;
      if (unit == "ps^-2") return v * 1e-6;
      break;
    case Dimension::phase:
      if (unit.empty() || unit == "rad") return v;
      if (unit == "deg") return v * units::pi / 180.0;
      if (unit == "pi") return v * units::pi;
      break;
    case Dimension::plain:
      if (unit.empty()) return v;
      break;
  }
  throw SchemaError(path, "unsupported unit '" + unit + "'");
}

inline double quantity(const json& value, Dimension dim,
                       const std::string& path) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    std::string s = trim(value.get<std::string>());
    if (dim == Dimension::phase && s.size() >= 2 &&
        s.compare(s.size() - 2, 2, "pi") == 0) {
      std::string coeff = trim(std::string_view(s).substr(0, s.size() - 2));
      if (coeff.empty() || coeff == "+") return units::pi;
      if (coeff == "-") return -units::pi;
      s = coeff + " pi";
    }
    const auto [v, unit] = split_quantity(s, path);
    return convert(v, unit, dim, path);
  }
  throw SchemaError(path, "expected a number or a quantity string");
}

inline std::optional<double> opt_quantity(const json& obj, std::string_view key,
                                          Dimension dim,
                                          const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return std::nullopt;
  return quantity(*it, dim, join(path, key));
}

inline bool opt_bool(const json& obj, std::string_view key, bool fallback,
                     const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) throw SchemaError(join(path, key), "expected a boolean");
  return it->get<bool>();
}

inline std::optional<std::string> opt_string(const json& obj,
                                             std::string_view key,
                                             const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(join(path, key), "expected a string");
  return it->get<std::string>();
}

inline std::optional<long long> opt_integer(const json& obj,
                                            std::string_view key,
                                            const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return std::nullopt;
  if (!it->is_number_integer())
    throw SchemaError(join(path, key), "expected an integer");
  return it->get<long long>();
}

inline complex complex_value(const json& value, const std::string& path) {
  if (value.is_number()) return {value.get<double>(), 0.0};
  if (value.is_array() && value.size() == 2 && value[0].is_number() &&
      value[1].is_number())
    return {value[0].get<double>(), value[1].get<double>()};
  throw SchemaError(path, "expected a number or [re, im]");
}

inline complex opt_complex(const json& obj, std::string_view key,
                           complex fallback, const std::string& path) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) return fallback;
  return complex_value(*it, join(path, key));
}

inline json complex_json(complex c) { return json::array({c.real(), c.imag()}); }

inline SignalKind parse_signal_kind(const std::string& s, bool& compare,
                                    const std::string& path) {
  compare = false;
  if (s == "fastcars") return SignalKind::fastcars;
  if (s == "qfrs-intensity") return SignalKind::qfrs_intensity;
  if (s == "qfrs-heterodyne") return SignalKind::qfrs_heterodyne;
  if (s == "compare-probes") {
    compare = true;
    return SignalKind::qfrs_intensity;
  }
  throw SchemaError(path, "unknown signal kind '" + s + "'");
}

inline ProbeKind parse_probe_kind(const std::string& s, const std::string& path) {
  if (s == "entangled") return ProbeKind::entangled;
  if (s == "fock") return ProbeKind::fock;
  if (s == "classical") return ProbeKind::classical;
  if (s == "pseudo-thermal") return ProbeKind::pseudo_thermal;
  throw SchemaError(path, "unknown probe kind '" + s + "'");
}

inline SinglePhotonParams parse_single(const json* obj, SinglePhotonParams def,
                                       const std::string& path) {
  if (!obj) return def;
  check_keys(*obj, path, {"center", "sigma"});
  def.center = opt_quantity(*obj, "center", Dimension::energy, path)
                   .value_or(def.center);
  def.sigma =
      opt_quantity(*obj, "sigma", Dimension::energy, path).value_or(def.sigma);
  return def;
}

inline const json* child(const json& obj, std::string_view key) {
  const auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

inline ProbeConfig parse_probe(const json* obj) {
  const std::string path = "/probe";
  ProbeConfig p;
  if (!obj) {
    p.signal = p.idler = p.pulse = {0.5 * p.pair.omega0, p.pair.sigma0};
    p.jitter = p.pair.Ts;
    return p;
  }
  check_keys(*obj, path, {"kind", "omega0", "sigma0", "duration", "Ts", "Ti",
                          "jitter", "signal", "idler", "pulse"});
  if (auto k = opt_string(*obj, "kind", path))
    p.kind = parse_probe_kind(*k, join(path, "kind"));
  p.pair.omega0 = opt_quantity(*obj, "omega0", Dimension::energy, path)
                      .value_or(p.pair.omega0);
  const auto sigma0 = opt_quantity(*obj, "sigma0", Dimension::energy, path);
  const auto duration = opt_quantity(*obj, "duration", Dimension::time, path);
  if (sigma0 && duration)
    throw SchemaError(join(path, "duration"), "give sigma0 or duration, not both");
  if (sigma0) p.pair.sigma0 = *sigma0;
  if (duration) {
    if (!(*duration > 0.0)) throw ValidationError("duration", "must be > 0");
    p.pair.sigma0 = units::hbar / *duration;
  }
  p.pair.Ts = opt_quantity(*obj, "Ts", Dimension::time, path).value_or(p.pair.Ts);
  p.pair.Ti = opt_quantity(*obj, "Ti", Dimension::time, path).value_or(p.pair.Ti);
  p.jitter = opt_quantity(*obj, "jitter", Dimension::time, path).value_or(p.pair.Ts);
  const SinglePhotonParams arm{0.5 * p.pair.omega0, p.pair.sigma0};
  p.signal = parse_single(child(*obj, "signal"), arm, join(path, "signal"));
  p.idler = parse_single(child(*obj, "idler"), arm, join(path, "idler"));
  p.pulse = parse_single(child(*obj, "pulse"), arm, join(path, "pulse"));
  p.pair.validate();
  p.signal.validate();
  p.idler.validate();
  p.pulse.validate();
  if (!(p.jitter >= 0.0)) throw ValidationError("jitter", "must be >= 0");
  return p;
}

inline VibrationalModeSet parse_vibrational(const json& obj,
                                            const std::string& path) {
  check_keys(obj, path, {"preset", "modes", "molecules", "gamma"});
  const double gamma = opt_quantity(obj, "gamma", Dimension::energy, path)
                           .value_or(units::hbar / 5000.0);
  VibrationalModeSet set;
  if (auto preset = opt_string(obj, "preset", path)) {
    if (*preset != "methane")
      throw SchemaError(join(path, "preset"), "unknown preset '" + *preset + "'");
    set = methane_modes(gamma);
  }
  if (const json* modes = child(obj, "modes")) {
    if (!modes->is_array()) throw SchemaError(join(path, "modes"), "expected an array");
    set.modes.clear();
    for (std::size_t i = 0; i < modes->size(); ++i) {
      const std::string mp = join(path, "modes/" + std::to_string(i));
      const json& m = (*modes)[i];
      check_keys(m, mp, {"label", "frequency", "gamma", "dephasing_time",
                         "alpha", "rho0"});
      VibrationalMode mode;
      mode.label = opt_string(m, "label", mp).value_or("b" + std::to_string(i));
      const auto freq = opt_quantity(m, "frequency", Dimension::energy, mp);
      if (!freq) throw SchemaError(join(mp, "frequency"), "missing");
      mode.omega_bg = *freq;
      const auto g = opt_quantity(m, "gamma", Dimension::energy, mp);
      const auto t = opt_quantity(m, "dephasing_time", Dimension::time, mp);
      if (g && t)
        throw SchemaError(join(mp, "dephasing_time"), "give gamma or dephasing_time, not both");
      mode.gamma_bg = g ? *g : gamma;
      if (t) {
        if (!(*t > 0.0)) throw ValidationError("dephasing_time", "must be > 0");
        mode.gamma_bg = units::hbar / *t;
      }
      mode.alpha = opt_complex(m, "alpha", mode.alpha, mp);
      mode.rho0 = opt_complex(m, "rho0", mode.rho0, mp);
      set.modes.push_back(mode);
    }
  }
  if (auto n = opt_integer(obj, "molecules", path)) set.n_molecules = *n;
  set.validate();
  return set;
}

inline VibronicModel parse_vibronic(const json& obj, const std::string& path,
                                    std::optional<long long> n_max) {
  check_keys(obj, path, {"preset", "branches", "v_h"});
  VibronicModel model;
  if (auto preset = opt_string(obj, "preset", path)) {
    if (*preset != "nitrostilbene")
      throw SchemaError(join(path, "preset"), "unknown preset '" + *preset + "'");
    model = nitrostilbene_model();
  }
  model.v_h = opt_quantity(obj, "v_h", Dimension::energy, path).value_or(model.v_h);
  if (const json* branches = child(obj, "branches")) {
    if (!branches->is_array())
      throw SchemaError(join(path, "branches"), "expected an array");
    model.branches.clear();
    for (std::size_t i = 0; i < branches->size(); ++i) {
      const std::string bp = join(path, "branches/" + std::to_string(i));
      const json& b = (*branches)[i];
      check_keys(b, bp, {"label", "omega_gap", "F", "D", "dephasing_time",
                         "alpha", "rho0"});
      ExcitedStateBranch branch;
      branch.label = opt_string(b, "label", bp).value_or("e" + std::to_string(i + 1));
      const auto gap = opt_quantity(b, "omega_gap", Dimension::energy, bp);
      if (!gap) throw SchemaError(join(bp, "omega_gap"), "missing");
      branch.omega_gap = *gap;
      branch.F = opt_quantity(b, "F", Dimension::plain, bp).value_or(0.0);
      const auto D = opt_quantity(b, "D", Dimension::rate, bp);
      const auto t = opt_quantity(b, "dephasing_time", Dimension::time, bp);
      if (D && t)
        throw SchemaError(join(bp, "dephasing_time"), "give D or dephasing_time, not both");
      if (D) branch.D = *D;
      if (t) {
        if (!(*t > 0.0)) throw ValidationError("dephasing_time", "must be > 0");
        branch.D = 1.0 / (*t * *t);
      }
      branch.alpha = opt_complex(b, "alpha", branch.alpha, bp);
      branch.rho0 = opt_complex(b, "rho0", branch.rho0, bp);
      model.branches.push_back(branch);
    }
  }
  if (model.branches.empty())
    throw ValidationError("branches", "need at least one branch");
  for (const auto& b : model.branches) b.validate();
  model.n_max = n_max ? static_cast<int>(*n_max) : model.required_order();
  model.validate();
  return model;
}

inline AxisConfig parse_axis(const json* obj, AxisConfig def, Dimension dim,
                             double (*to_unit)(double), const std::string& path,
                             const char* field) {
  if (obj) {
    check_keys(*obj, path, {"min", "max", "count", "unit"});
    auto read = [&](std::string_view key, double fallback) {
      const auto it = obj->find(std::string(key));
      if (it == obj->end()) return fallback;
      if (it->is_number()) return it->get<double>();
      return to_unit(quantity(*it, dim, join(path, key)));
    };
    def.min = read("min", def.min);
    def.max = read("max", def.max);
    if (auto c = opt_integer(*obj, "count", path)) {
      if (*c < 1) throw ValidationError(std::string(field) + ".count", "must be >= 1");
      def.count = static_cast<std::size_t>(*c);
    }
  }
  if (!std::isfinite(def.min) || !std::isfinite(def.max))
    throw ValidationError(field, "range must be finite");
  if (def.count > 1 && !(def.max > def.min))
    throw ValidationError(field, "range is degenerate (need max > min)");
  if (def.count == 1 && def.max < def.min)
    throw ValidationError(field, "max < min");
  return def;
}

inline double identity(double x) { return x; }
inline double ev_to_wavenumber(double x) { return units::to_wavenumber(x); }

}  // namespace config_detail

/// Parses a JSON run configuration. `forced_kind` (the CLI subcommand) fills
/// in a missing "signal" key and must agree with a present one.
inline RunConfig parse_config(const json& doc,
                              std::optional<std::string> forced_kind = {}) {
  using namespace config_detail;
  const std::string root;
  check_keys(doc, root, {"signal", "probe", "model", "detection", "grid",
                         "output", "numeric", "results", "tool"});
  RunConfig cfg;

  auto kind_text = opt_string(doc, "signal", root);
  if (kind_text && forced_kind && *kind_text != *forced_kind)
    throw ValidationError("signal", "config says '" + *kind_text +
                                        "' but the command is '" + *forced_kind + "'");
  if (!kind_text) kind_text = forced_kind;
  if (!kind_text) throw SchemaError("/signal", "missing");

  const json* numeric = child(doc, "numeric");
  std::optional<long long> n_max;
  if (numeric) {
    check_keys(*numeric, "/numeric",
               {"rel_tol", "n_max", "method", "normalization_window"});
    cfg.numeric.rel_tol =
        opt_quantity(*numeric, "rel_tol", Dimension::plain, "/numeric")
            .value_or(cfg.numeric.rel_tol);
    if (!(cfg.numeric.rel_tol > 0.0 && cfg.numeric.rel_tol < 1.0))
      throw ValidationError("rel_tol", "must lie in (0, 1)");
    n_max = opt_integer(*numeric, "n_max", "/numeric");
    if (auto m = opt_string(*numeric, "method", "/numeric")) {
      if (*m == "quadrature")
        cfg.numeric.method = LineshapeMethod::quadrature;
      else if (*m == "approximation")
        cfg.numeric.method = LineshapeMethod::approximation;
      else
        throw SchemaError("/numeric/method", "expected quadrature|approximation");
    }
    cfg.numeric.normalization_window =
        opt_quantity(*numeric, "normalization_window", Dimension::energy, "/numeric")
            .value_or(cfg.numeric.normalization_window);
    if (!(cfg.numeric.normalization_window > 0.0))
      throw ValidationError("normalization_window", "must be > 0");
  }

  const json* model = child(doc, "model");
  if (!model) throw SchemaError("/model", "missing");
  if (!model->is_object()) throw SchemaError("/model", "expected an object");
  const bool vibrational_block = model->contains("modes") ||
                                 model->contains("molecules") ||
                                 model->contains("gamma") ||
                                 (model->contains("preset") && (*model)["preset"] == "methane");

  cfg.signal = parse_signal_kind(*kind_text, cfg.compare_probes, "/signal");
  if (cfg.compare_probes && vibrational_block) cfg.signal = SignalKind::fastcars;
  const bool wants_vibrational = cfg.signal == SignalKind::fastcars;
  if (vibrational_block != wants_vibrational)
    throw ValidationError("model", std::string("model block does not match signal kind ") +
                                       *kind_text);
  if (wants_vibrational) {
    if (n_max) throw ValidationError("n_max", "only meaningful for vibronic models");
    cfg.model = parse_vibrational(*model, "/model");
  } else {
    cfg.model = parse_vibronic(*model, "/model", n_max);
  }

  cfg.probe = parse_probe(child(doc, "probe"));

  const ProbeState state = cfg.probe.state();
  if (const json* det = child(doc, "detection")) {
    check_keys(*det, "/detection", {"omega_i", "lo_phase", "omega_bar"});
    cfg.detection.omega_i = opt_quantity(*det, "omega_i", Dimension::energy, "/detection");
    if (auto phi = opt_quantity(*det, "lo_phase", Dimension::phase, "/detection")) {
      if (!std::isfinite(*phi)) throw ValidationError("lo_phase", "must be finite");
      cfg.detection.lo_phase = wrap_phase(*phi);
    }
    if (const json* bar = child(*det, "omega_bar")) {
      if (bar->is_string() && bar->get<std::string>() == "detection") {
        cfg.detection.omega_bar_rule = OmegaBarRule::detection;
      } else {
        cfg.detection.omega_bar_rule = OmegaBarRule::fixed;
        cfg.detection.omega_bar = quantity(*bar, Dimension::energy, "/detection/omega_bar");
      }
    }
  }
  if (!cfg.detection.omega_i) cfg.detection.omega_i = default_idler_energy(state);
  cfg.detection.validate();

  const json* grid = child(doc, "grid");
  if (grid) check_keys(*grid, "/grid", {"shift", "delay"});
  const json* shift = grid ? child(*grid, "shift") : nullptr;
  const json* delay = grid ? child(*grid, "delay") : nullptr;
  cfg.grid.shift_unit = wants_vibrational ? ShiftUnit::wavenumber : ShiftUnit::eV;
  if (shift) {
    if (auto u = opt_string(*shift, "unit", "/grid/shift")) {
      if (*u == "eV")
        cfg.grid.shift_unit = ShiftUnit::eV;
      else if (*u == "cm^-1")
        cfg.grid.shift_unit = ShiftUnit::wavenumber;
      else
        throw SchemaError("/grid/shift/unit", "expected eV|cm^-1");
    }
  }
  const bool wn = cfg.grid.shift_unit == ShiftUnit::wavenumber;
  const AxisConfig shift_default =
      wants_vibrational ? AxisConfig{1200.0, 3200.0, 201} : AxisConfig{1.2, 3.2, 201};
  AxisConfig sd = shift_default;
  if (wn != wants_vibrational) {
    sd.min = wn ? units::to_wavenumber(sd.min) : units::from_wavenumber(sd.min);
    sd.max = wn ? units::to_wavenumber(sd.max) : units::from_wavenumber(sd.max);
  }
  cfg.grid.shift = parse_axis(shift, sd, Dimension::energy,
                              wn ? ev_to_wavenumber : identity, "/grid/shift", "shift");
  const AxisConfig delay_default =
      wants_vibrational ? AxisConfig{0.0, 2000.0, 201} : AxisConfig{0.0, 100.0, 201};
  cfg.grid.delay = parse_axis(delay, delay_default, Dimension::time, identity,
                              "/grid/delay", "delay");
  if (cfg.grid.delay.min < 0.0) throw ValidationError("delay", "T must be >= 0");

  if (const json* out = child(doc, "output")) {
    check_keys(*out, "/output", {"directory", "format", "normalize", "plot_script"});
    cfg.output.directory = opt_string(*out, "directory", "/output").value_or(cfg.output.directory);
    if (auto f = opt_string(*out, "format", "/output")) {
      if (*f == "text")
        cfg.output.format = OutputFormat::text;
      else if (*f == "binary")
        cfg.output.format = OutputFormat::binary;
      else
        throw SchemaError("/output/format", "expected text|binary");
    }
    cfg.output.normalize = opt_bool(*out, "normalize", false, "/output");
    cfg.output.plot_script = opt_bool(*out, "plot_script", true, "/output");
  }
  return cfg;
}

inline RunConfig parse_config(std::string_view text,
                              std::optional<std::string> forced_kind = {}) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc, std::move(forced_kind));
}

inline RunConfig parse_config(const std::string& text,
                              std::optional<std::string> forced_kind = {}) {
  return parse_config(std::string_view(text), std::move(forced_kind));
}

inline RunConfig parse_config(const char* text,
                              std::optional<std::string> forced_kind = {}) {
  return parse_config(std::string_view(text), std::move(forced_kind));
}

inline std::string signal_name(const RunConfig& cfg) {
  return cfg.compare_probes ? "compare-probes" : to_string(cfg.signal);
}

/// Fully resolved configuration with every default spelled out, in base
/// units (eV, fs, fs⁻², rad). parse_config(to_json(c)) reproduces c.
inline json to_json(const RunConfig& cfg) {
  using config_detail::complex_json;
  json j;
  j["signal"] = signal_name(cfg);
  const auto& p = cfg.probe;
  auto single = [](const SinglePhotonParams& s) {
    return json{{"center", s.center}, {"sigma", s.sigma}};
  };
  j["probe"] = {{"kind", to_string(p.kind)}, {"omega0", p.pair.omega0},
                {"sigma0", p.pair.sigma0},   {"Ts", p.pair.Ts},
                {"Ti", p.pair.Ti},           {"jitter", p.jitter},
                {"signal", single(p.signal)}, {"idler", single(p.idler)},
                {"pulse", single(p.pulse)}};
  if (const auto* vib = std::get_if<VibrationalModeSet>(&cfg.model)) {
    json modes = json::array();
    for (const auto& m : vib->modes)
      modes.push_back({{"label", m.label}, {"frequency", m.omega_bg},
                       {"gamma", m.gamma_bg}, {"alpha", complex_json(m.alpha)},
                       {"rho0", complex_json(m.rho0)}});
    j["model"] = {{"modes", modes}, {"molecules", vib->n_molecules}};
  } else {
    const auto& vm = std::get<VibronicModel>(cfg.model);
    json branches = json::array();
    for (const auto& b : vm.branches)
      branches.push_back({{"label", b.label}, {"omega_gap", b.omega_gap},
                          {"F", b.F}, {"D", b.D}, {"alpha", complex_json(b.alpha)},
                          {"rho0", complex_json(b.rho0)}});
    j["model"] = {{"branches", branches}, {"v_h", vm.v_h}};
  }
  j["detection"] = {{"omega_i", cfg.detection.omega_i.value_or(0.0)},
                    {"lo_phase", cfg.detection.lo_phase}};
  if (cfg.detection.omega_bar_rule == OmegaBarRule::detection)
    j["detection"]["omega_bar"] = "detection";
  else
    j["detection"]["omega_bar"] = cfg.detection.omega_bar;
  auto axis = [](const AxisConfig& a) {
    return json{{"min", a.min}, {"max", a.max}, {"count", a.count}};
  };
  j["grid"]["shift"] = axis(cfg.grid.shift);
  j["grid"]["shift"]["unit"] = cfg.grid.shift_unit == ShiftUnit::eV ? "eV" : "cm^-1";
  j["grid"]["delay"] = axis(cfg.grid.delay);
  j["output"] = {{"directory", cfg.output.directory},
                 {"format", cfg.output.format == OutputFormat::text ? "text" : "binary"},
                 {"normalize", cfg.output.normalize},
                 {"plot_script", cfg.output.plot_script}};
  j["numeric"] = {{"rel_tol", cfg.numeric.rel_tol},
                  {"method", to_string(cfg.numeric.method)},
                  {"normalization_window", cfg.numeric.normalization_window}};
  if (const auto* vm = std::get_if<VibronicModel>(&cfg.model))
    j["numeric"]["n_max"] = vm->n_max;
  return j;
}

}  // namespace qraman
