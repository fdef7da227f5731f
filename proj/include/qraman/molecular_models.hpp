#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qraman/errors.hpp"
#include "qraman/numerics/sampled.hpp"
#include "qraman/units.hpp"

namespace qraman {

using complex = std::complex<double>;

/// Ground-state Raman-active mode probed in FAST CARS.
struct VibrationalMode {
  std::string label;
  double omega_bg = 0.0;  // eV
  double gamma_bg = 0.0;  // eV; |ρ(t)| ∝ e^{−γt/ħ}
  complex alpha{1.0, 0.0};
  complex rho0{1.0, 0.0};

  void validate() const {
    if (!(omega_bg > 0.0)) throw ValidationError("omega_bg", "must be > 0");
    if (!(gamma_bg >= 0.0)) throw ValidationError("gamma_bg", "must be >= 0");
  }
};

struct VibrationalModeSet {
  std::vector<VibrationalMode> modes;
  long long n_molecules = 1;

  void validate() const {
    if (modes.empty()) throw ValidationError("modes", "need at least one mode");
    if (n_molecules < 1) throw ValidationError("molecules", "must be >= 1");
    std::set<double> seen;
    for (const auto& m : modes) {
      m.validate();
      if (!seen.insert(m.omega_bg).second)
        throw ValidationError("modes", "mode frequencies must be distinct");
    }
  }
};

/// Methane Raman-active modes: A1 2914, E 1534, T2 3019 and T2 1306 cm⁻¹.
/// Only A1 is fixed by the experiment this targets; the rest are editable
/// literature values. gamma defaults to a 5 ps dephasing time.
inline VibrationalModeSet methane_modes(double gamma = units::hbar / 5000.0) {
  VibrationalModeSet set;
  for (auto [label, cm] : {std::pair{"A1", 2914.0}, std::pair{"E", 1534.0},
                           std::pair{"T2", 3019.0}, std::pair{"T2'", 1306.0}}) {
    set.modes.push_back({label, units::from_wavenumber(cm), gamma});
  }
  return set;
}

/// One excited state e_j coupled to the prepared state e.
struct ExcitedStateBranch {
  std::string label;
  double omega_gap = 0.0;  // ω̃_{e,e_j}, eV
  double F = 0.0;          // Franck-Condon strength
  double D = 0.0;          // Gaussian dephasing rate, fs⁻²
  complex alpha{1.0, 0.0};
  complex rho0{1.0, 0.0};

  void validate() const {
    if (!(F >= 0.0)) throw ValidationError("F", "must be >= 0");
    if (!(D >= 0.0)) throw ValidationError("D", "must be >= 0");
  }
};

inline double franck_condon_weight(double F, int n) {
  if (F < 0.0 || n < 0)
    throw std::invalid_argument("franck_condon_weight: need F >= 0, n >= 0");
  if (F == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n > 20)
    return std::exp(-F + n * std::log(F) - std::lgamma(n + 1.0));
  double w = std::exp(-F);
  for (int k = 1; k <= n; ++k) w *= F / k;
  return w;
}

/// Smallest n_max with Σ_{n>n_max} S_n < eps.
inline int required_harmonics(double F, double eps = 1e-6) {
  int n_max = 0;
  for (;; ++n_max) {
    double tail = 0.0;
    for (int k = n_max + 1; k < n_max + 400; ++k) {
      const double s = franck_condon_weight(F, k);
      tail += s;
      if (k > F && s < 1e-18 * std::max(tail, 1e-300)) break;
    }
    if (tail < eps) return n_max;
  }
}

struct VibronicModel {
  std::vector<ExcitedStateBranch> branches;
  double v_h = 0.26;  // eV
  int n_max = 0;

  /// Truncation order meeting the 1e-6 tail budget on every branch.
  int required_order() const {
    int n = 0;
    for (const auto& b : branches) n = std::max(n, required_harmonics(b.F));
    return n;
  }

  void validate() const {
    if (branches.empty())
      throw ValidationError("branches", "need at least one branch");
    if (!(v_h > 0.0)) throw ValidationError("v_h", "must be > 0");
    for (const auto& b : branches) b.validate();
    if (n_max < required_order())
      throw ValidationError("n_max", "truncation tail exceeds 1e-6; need >= " +
                                         std::to_string(required_order()));
  }
};

/// Two-branch model of 4-amino-4'-nitrostilbene: gaps 7.1−5.3 and 7.1−5.7 eV,
/// v_h = 0.26 eV, F = 2.2 / 1.3, D^{-1/2} = 30 / 20 fs.
inline VibronicModel nitrostilbene_model() {
  VibronicModel m;
  m.v_h = 0.26;
  m.branches.push_back({"e1", 7.1 - 5.3, 2.2, 1.0 / (30.0 * 30.0)});
  m.branches.push_back({"e2", 7.1 - 5.7, 1.3, 1.0 / (20.0 * 20.0)});
  m.n_max = m.required_order();
  return m;
}

inline std::string describe(const VibrationalModeSet& set) {
  std::ostringstream os;
  os.precision(10);
  os << "vibrational modes [";
  for (std::size_t i = 0; i < set.modes.size(); ++i) {
    const auto& m = set.modes[i];
    os << (i ? "; " : "") << (m.label.empty() ? "mode" : m.label) << " "
       << m.omega_bg << " eV gamma " << m.gamma_bg << " eV";
  }
  os << "], N=" << set.n_molecules;
  return os.str();
}

inline std::string describe(const VibronicModel& model) {
  std::ostringstream os;
  os.precision(10);
  os << "vibronic branches [";
  for (std::size_t i = 0; i < model.branches.size(); ++i) {
    const auto& b = model.branches[i];
    os << (i ? "; " : "") << (b.label.empty() ? "branch" : b.label) << " gap "
       << b.omega_gap << " eV F " << b.F << " D " << b.D << " fs^-2";
  }
  os << "], v_h " << model.v_h << " eV, n_max " << model.n_max;
  return os.str();
}

inline complex vibrational_coherence(const VibrationalMode& mode, double t) {
  if (t < 0.0) throw std::invalid_argument("vibrational_coherence: t < 0");
  return mode.rho0 *
         std::exp(complex(-mode.gamma_bg, -mode.omega_bg) * (t / units::hbar));
}

namespace detail {

/// Closed form continued to all real t; the e^{−Dt²} factor is even.
inline complex vibronic_harmonic(const ExcitedStateBranch& branch, double v_h,
                                 int n, double t) {
  const double energy = branch.omega_gap + n * v_h;
  return branch.rho0 * franck_condon_weight(branch.F, n) *
         std::exp(complex(-branch.D * t * t, -energy * t / units::hbar));
}

}  // namespace detail

/// ρ^{(n)}_{e,e_j}(t) = ρ0·S_n·e^{−i(ω̃+n v_h)t/ħ − D t²}.
inline complex vibronic_coherence_harmonic(const ExcitedStateBranch& branch,
                                           double v_h, int n, double t) {
  if (t < 0.0 || n < 0)
    throw std::invalid_argument("vibronic_coherence_harmonic: need t, n >= 0");
  return detail::vibronic_harmonic(branch, v_h, n, t);
}

inline complex total_vibronic_coherence(const ExcitedStateBranch& branch,
                                        double v_h, int n_max, double t) {
  if (t < 0.0 || n_max < 0)
    throw std::invalid_argument("total_vibronic_coherence: need t, n_max >= 0");
  complex sum{0.0, 0.0};
  for (int n = 0; n <= n_max; ++n) sum += detail::vibronic_harmonic(branch, v_h, n, t);
  return sum;
}

/// Closed-form vibronic coherence of one branch: a single harmonic, or the
/// partial sum over n = 0..n_max when harmonic is empty.
struct ClosedFormTrajectory {
  ExcitedStateBranch branch;
  double v_h = 0.26;
  int n_max = 0;
  std::optional<int> harmonic;
};

/// Numerically sampled coherence on a uniform time axis (fs); zero outside.
struct SampledTrajectory {
  SampledComplexFunction samples;
};

class CoherenceTrajectory {
 public:
  CoherenceTrajectory(ClosedFormTrajectory closed) : form_(std::move(closed)) {}
  CoherenceTrajectory(SampledTrajectory sampled)
      : form_(std::move(sampled)),
        spline_(std::get<SampledTrajectory>(form_).samples) {
    if (std::get<SampledTrajectory>(form_).samples.kind != AxisKind::time)
      throw std::invalid_argument("CoherenceTrajectory: samples need a time axis");
  }

  complex operator()(double t) const {
    if (const auto* c = std::get_if<ClosedFormTrajectory>(&form_)) {
      if (c->harmonic) return detail::vibronic_harmonic(c->branch, c->v_h, *c->harmonic, t);
      complex sum{0.0, 0.0};
      for (int n = 0; n <= c->n_max; ++n)
        sum += detail::vibronic_harmonic(c->branch, c->v_h, n, t);
      return sum;
    }
    return spline_(t);
  }

  /// Interval outside of which |ρ| < 1e-12·|ρ(0)|.
  std::pair<double, double> support() const {
    if (const auto* c = std::get_if<ClosedFormTrajectory>(&form_)) {
      if (c->branch.D <= 0.0)
        return {-std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
      const double w = std::sqrt(-std::log(1e-12) / c->branch.D);
      return {-w, w};
    }
    return {spline_.lower(), spline_.upper()};
  }

  bool is_closed_form() const {
    return std::holds_alternative<ClosedFormTrajectory>(form_);
  }

 private:
  std::variant<ClosedFormTrajectory, SampledTrajectory> form_;
  ComplexSpline spline_;
};

}  // namespace qraman
