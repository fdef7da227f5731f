#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qraman/config.hpp"
#include "qraman/errors.hpp"
#include "qraman/signal_engine.hpp"

#ifndef QRAMAN_VERSION
#define QRAMAN_VERSION "0.0.0"
#endif

namespace qraman {

namespace fs = std::filesystem;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct NamedGrid {
  std::string name;
  SignalGrid grid;
};

/// Scans every grid the configuration asks for: one, or three for
/// compare-probes.
inline std::vector<NamedGrid> compute_grids(const RunConfig& cfg,
                                            unsigned threads = 1) {
  const auto shifts = cfg.grid.shift_values_ev();
  const auto delays = cfg.grid.delay.values();
  const auto opts = cfg.engine_options(threads);
  std::vector<NamedGrid> out;
  auto scan = [&](const ProbeState& probe) {
    return scan_grid(cfg.signal, cfg.model, probe, cfg.detection, shifts,
                     delays, cfg.output.normalize, opts);
  };
  if (cfg.compare_probes) {
    for (ProbeKind k : {ProbeKind::entangled, ProbeKind::classical, ProbeKind::fock})
      out.push_back({to_string(k), scan(cfg.probe.as(k))});
  } else {
    out.push_back({to_string(cfg.signal), scan(cfg.probe.state())});
  }
  return out;
}

struct GridStats {
  double min = 0.0, max = 0.0;
  std::size_t argmin_row = 0, argmin_col = 0;
  std::size_t argmax_row = 0, argmax_col = 0;
};

inline GridStats grid_stats(const SignalGrid& g) {
  GridStats s;
  const std::size_t cols = g.shift_axis.size();
  s.min = s.max = g.values.front();
  for (std::size_t i = 1; i < g.values.size(); ++i) {
    if (g.values[i] < s.min) {
      s.min = g.values[i];
      s.argmin_row = i / cols;
      s.argmin_col = i % cols;
    }
    if (g.values[i] > s.max) {
      s.max = g.values[i];
      s.argmax_row = i / cols;
      s.argmax_col = i % cols;
    }
  }
  return s;
}

inline const char* shift_unit_name(ShiftUnit u) {
  return u == ShiftUnit::eV ? "eV" : "cm^-1";
}

/// Delimited-text matrix: '#' header lines, then one tab-separated row per
/// delay value.
inline std::string render_dat(const SignalGrid& g, const RunConfig& cfg) {
  const auto shift_display = cfg.grid.shift.values();
  const char* unit = shift_unit_name(cfg.grid.shift_unit);
  std::ostringstream os;
  os << "# qraman " << QRAMAN_VERSION << '\n'
     << "# signal: " << to_string(g.meta.kind) << '\n'
     << "# probe: " << g.meta.probe << '\n'
     << "# model: " << g.meta.model << '\n'
     << "# method: " << to_string(g.meta.method) << '\n'
     << "# normalization: " << format_double(g.meta.normalization) << '\n'
     << "# prefactor: " << format_double(g.meta.prefactor) << '\n'
     << "# scale: " << format_double(g.meta.scale)
     << (g.meta.normalized ? " (values divided by scale)" : "") << '\n'
     << "# omega_pr: " << format_double(g.meta.omega_pr) << " eV\n"
     << "# omega_i: " << format_double(g.meta.omega_i) << " eV\n"
     << "# rows: delay T [fs] x " << g.delay_axis.size() << '\n'
     << "# columns: shift omega - omega_pr [" << unit << "] x "
     << g.shift_axis.size() << '\n';
  os << "# shift_axis:";
  for (double v : shift_display) os << ' ' << format_double(v);
  os << "\n# delay_axis:";
  for (double v : g.delay_axis) os << ' ' << format_double(v);
  os << '\n';
  const std::size_t cols = g.shift_axis.size();
  for (std::size_t r = 0; r < g.delay_axis.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c) os << '\t';
      os << format_double(g.values[r * cols + c]);
    }
    os << '\n';
  }
  return os.str();
}

struct DatFile {
  std::map<std::string, std::string> header;
  std::vector<double> shift_axis;
  std::vector<double> delay_axis;
  std::vector<double> values;
};

inline DatFile read_dat(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  DatFile d;
  std::string line;
  auto numbers = [](const std::string& s) {
    std::vector<double> v;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) v.push_back(std::strtod(tok.c_str(), nullptr));
    return v;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = config_detail::trim(line.substr(1, colon - 1));
      const std::string value = config_detail::trim(line.substr(colon + 1));
      if (key == "shift_axis")
        d.shift_axis = numbers(value);
      else if (key == "delay_axis")
        d.delay_axis = numbers(value);
      else
        d.header[key] = value;
      continue;
    }
    for (double v : numbers(line)) d.values.push_back(v);
  }
  return d;
}

inline std::string render_bin(const SignalGrid& g) {
  std::string bytes(g.values.size() * sizeof(double), '\0');
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(g.values[i]);
    if constexpr (std::endian::native == std::endian::big)
      bits = __builtin_bswap64(bits);
    std::memcpy(bytes.data() + i * sizeof(double), &bits, sizeof bits);
  }
  return bytes;
}

inline std::string render_plot_script(const std::string& data_file,
                                      const std::string& title,
                                      const char* shift_unit, bool binary,
                                      std::size_t rows, std::size_t cols) {
  std::ostringstream os;
  os << "import json\n"
        "import numpy as np\n"
        "import matplotlib.pyplot as plt\n\n";
  if (binary) {
    os << "meta = json.load(open('metadata.json'))\n"
          "shift = np.linspace(meta['grid']['shift']['min'], "
          "meta['grid']['shift']['max'], meta['grid']['shift']['count'])\n"
          "delay = np.linspace(meta['grid']['delay']['min'], "
          "meta['grid']['delay']['max'], meta['grid']['delay']['count'])\n"
       << "data = np.fromfile('" << data_file << "', dtype='<f8').reshape(" << rows
       << ", " << cols << ")\n";
  } else {
    os << "axes = {}\n"
       << "for line in open('" << data_file << "'):\n"
          "    if line.startswith('# shift_axis:') or line.startswith('# delay_axis:'):\n"
          "        key, values = line[2:].split(':', 1)\n"
          "        axes[key] = np.array(values.split(), dtype=float)\n"
          "shift, delay = axes['shift_axis'], axes['delay_axis']\n"
       << "data = np.loadtxt('" << data_file << "', comments='#')\n";
  }
  os << "\nfig, ax = plt.subplots()\n"
        "mesh = ax.pcolormesh(shift, delay, data, shading='auto')\n"
     << "ax.set_xlabel('Raman shift [" << shift_unit << "]')\n"
        "ax.set_ylabel('delay T [fs]')\n"
     << "ax.set_title('" << title << "')\n"
        "fig.colorbar(mesh)\n"
        "plt.show()\n";
  return os.str();
}

namespace run_detail {

/// Files are staged under temporary names and renamed together; a failure
/// removes everything this run created.
class StagedWriter {
 public:
  explicit StagedWriter(fs::path dir) : dir_(std::move(dir)) {}
  ~StagedWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : staged_) fs::remove(temp(p), ec);
    for (const auto& p : final_) fs::remove(p, ec);
  }

  void add(const std::string& name, const std::string& bytes) {
    const fs::path target = dir_ / name;
    staged_.push_back(target);
    std::ofstream out(temp(target), std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) throw Error("failed to write " + temp(target).string());
  }

  std::vector<fs::path> commit() {
    for (const auto& p : staged_) {
      fs::rename(temp(p), p);
      final_.push_back(p);
    }
    staged_.clear();
    committed_ = true;
    return final_;
  }

 private:
  static fs::path temp(const fs::path& p) {
    fs::path t = p;
    t += ".partial";
    return t;
  }
  fs::path dir_;
  std::vector<fs::path> staged_;
  std::vector<fs::path> final_;
  bool committed_ = false;
};

inline json stats_json(const SignalGrid& g, const RunConfig& cfg) {
  const auto s = grid_stats(g);
  const auto shift_display = cfg.grid.shift.values();
  const char* unit = shift_unit_name(cfg.grid.shift_unit);
  auto coord = [&](std::size_t r, std::size_t c) {
    return json{{"row", r},
                {"col", c},
                {"delay_fs", g.delay_axis[r]},
                {std::string("shift_") + unit, shift_display[c]}};
  };
  return {{"min", s.min},
          {"max", s.max},
          {"argmin", coord(s.argmin_row, s.argmin_col)},
          {"argmax", coord(s.argmax_row, s.argmax_col)}};
}

}  // namespace run_detail

/// Executes the configured scan(s) and writes the artifacts into
/// cfg.output.directory. Returns the written paths.
inline std::vector<fs::path> run(const RunConfig& cfg, unsigned threads = 1) {
  const auto grids = compute_grids(cfg, threads);
  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  run_detail::StagedWriter writer(dir);
  const bool binary = cfg.output.format == OutputFormat::binary;
  const char* unit = shift_unit_name(cfg.grid.shift_unit);

  json meta = to_json(cfg);
  meta["tool"] = {{"name", "qraman"}, {"version", QRAMAN_VERSION}};
  json entries = json::array();
  for (const auto& [name, g] : grids) {
    const std::string data_file = name + (binary ? ".bin" : ".dat");
    writer.add(data_file, binary ? render_bin(g) : render_dat(g, cfg));
    json e = {{"name", name},
              {"file", data_file},
              {"format", binary ? "float64-le row-major" : "text"},
              {"rows", g.delay_axis.size()},
              {"cols", g.shift_axis.size()},
              {"row_axis", "delay T [fs]"},
              {"col_axis", std::string("shift omega - omega_pr [") + unit + "]"},
              {"signal", to_string(g.meta.kind)},
              {"probe", g.meta.probe},
              {"model", g.meta.model},
              {"normalization", g.meta.normalization},
              {"prefactor", g.meta.prefactor},
              {"scale", g.meta.scale},
              {"normalized", g.meta.normalized},
              {"omega_pr", g.meta.omega_pr},
              {"omega_i", g.meta.omega_i},
              {"stats", run_detail::stats_json(g, cfg)}};
    if (cfg.output.plot_script) {
      const std::string script = "plot_" + name + ".py";
      writer.add(script, render_plot_script(data_file, name, unit, binary,
                                            g.delay_axis.size(),
                                            g.shift_axis.size()));
      e["plot_script"] = script;
    }
    entries.push_back(std::move(e));
  }
  meta["results"] = {{"grids", std::move(entries)}};
  writer.add("metadata.json", meta.dump(2) + "\n");
  return writer.commit();
}

}  // namespace qraman
