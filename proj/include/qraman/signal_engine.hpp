#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "qraman/errors.hpp"
#include "qraman/molecular_models.hpp"
#include "qraman/numerics/quadrature.hpp"
#include "qraman/numerics/sampled.hpp"
#include "qraman/photon_states.hpp"
#include "qraman/units.hpp"

namespace qraman {

enum class SignalKind { fastcars, qfrs_intensity, qfrs_heterodyne };
enum class LineshapeMethod { quadrature, approximation };
enum class OmegaBarRule { detection, fixed };

inline const char* to_string(SignalKind k) {
  switch (k) {
    case SignalKind::fastcars: return "fastcars";
    case SignalKind::qfrs_intensity: return "qfrs-intensity";
    case SignalKind::qfrs_heterodyne: return "qfrs-heterodyne";
  }
  return "?";
}

inline const char* to_string(LineshapeMethod m) {
  return m == LineshapeMethod::quadrature ? "quadrature" : "approximation";
}

struct DetectionConfig {
  std::optional<double> omega_i;  // eV; defaults to the probe's idler centre
  double lo_phase = 0.0;          // rad, in (−π, π]
  OmegaBarRule omega_bar_rule = OmegaBarRule::detection;
  double omega_bar = 0.0;  // eV, used with OmegaBarRule::fixed

  void validate() const {
    if (!(lo_phase > -units::pi && lo_phase <= units::pi))
      throw ValidationError("lo_phase", "must lie in (-pi, pi]");
  }
};

/// Wraps an angle into (−π, π].
inline double wrap_phase(double phi) {
  double r = std::remainder(phi, units::two_pi);
  if (r <= -units::pi) r += units::two_pi;
  return r;
}

struct EngineOptions {
  double rel_tol = 1e-10;
  LineshapeMethod method = LineshapeMethod::quadrature;
  double normalization_window = 1.0;  // eV, see normalization()
  unsigned threads = 1;               // 0: hardware concurrency
};

/// Probe state evaluated at a fixed idler energy, with everything a signal
/// needs precomputed: the probe amplitude A(ωs), the time amplitude
/// Φ̃(τ) = envelope(τ)·e^{−i·carrier·τ/ħ}, and the signal weight.
class PreparedProbe {
 public:
  PreparedProbe(const ProbeState& probe, double omega_i,
                const EngineOptions& opts = {}, bool with_time_amplitude = true)
      : state_(probe), omega_i_(omega_i) {
    validate(probe);
    omega_pr_ = probe_frequency(probe, omega_i);
    std::visit([&](const auto& p) { init(p, opts, with_time_amplitude); }, probe);
  }

  const ProbeState& state() const { return state_; }
  double omega_i() const { return omega_i_; }
  double omega_pr() const { return omega_pr_; }
  /// 𝒩 for pair states, 1 otherwise.
  double normalization() const { return normalization_; }
  /// Factor applied to every signal value.
  double weight() const { return weight_; }
  std::optional<double> jitter() const { return jitter_; }
  bool entangled() const { return pair_.has_value(); }

  complex amplitude(complex omega_s) const {
    if (pair_) return two_photon_amplitude(*pair_, omega_s, omega_i_);
    return separable_amplitude(single_, omega_s);
  }

  bool has_time_amplitude() const { return has_time_; }
  double carrier() const { return carrier_; }
  complex envelope(double tau) const {
    if (pair_) return spline_(tau);
    const double s = single_.sigma / units::hbar;
    return s / std::sqrt(units::two_pi) * std::exp(-0.5 * s * s * tau * tau);
  }
  /// Φ̃(τ) including the carrier.
  complex time_amplitude(double tau) const {
    return envelope(tau) * std::polar(1.0, -carrier_ * tau / units::hbar);
  }
  std::pair<double, double> envelope_support() const { return support_; }
  double envelope_l1() const { return l1_; }
  /// Smoothness scale of the envelope, ħ/σ (fs).
  double envelope_feature() const { return feature_; }

 private:
  void init_pair(const EntangledPairParams& pair, const EngineOptions& opts,
                 bool with_time) {
    pair_ = pair;
    normalization_ = qraman::normalization(pair, opts.normalization_window);
    weight_ = 1.0 / normalization_;
    carrier_ = pair.omega0 - omega_i_;
    feature_ = units::hbar / pair.sigma0;
    if (!with_time) return;
    const double step = feature_ / 40.0;
    const auto [lo, hi] = time_amplitude_support(pair, 9.0);
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    const UniformGrid axis(lo, step, count);
    const auto env = two_photon_amplitude_time(pair, omega_i_, axis, carrier_);
    double peak = 0.0;
    for (const auto& v : env.values) peak = std::max(peak, std::abs(v));
    std::size_t first = 0, last = count - 1;
    while (first < last && std::abs(env.values[first]) <= 1e-12 * peak) ++first;
    while (last > first && std::abs(env.values[last]) <= 1e-12 * peak) --last;
    support_ = {axis[first > 0 ? first - 1 : 0], axis[std::min(last + 1, count - 1)]};
    l1_ = 0.0;
    for (const auto& v : env.values) l1_ += std::abs(v) * step;
    spline_ = ComplexSpline(env);
    has_time_ = true;
  }

  void init_single(const SinglePhotonParams& p) {
    single_ = p;
    carrier_ = p.center;
    feature_ = units::hbar / p.sigma;
    const double w = std::sqrt(2.0 * std::log(1e12)) * feature_;
    support_ = {-w, w};
    l1_ = 1.0;
    has_time_ = true;
  }

  void init(const EntangledProbe& p, const EngineOptions& o, bool t) {
    init_pair(p.pair, o, t);
  }
  void init(const PseudoThermalProbe& p, const EngineOptions& o, bool t) {
    init_pair(p.pair, o, t);
    if (p.jitter > 0.0) jitter_ = p.jitter;
  }
  void init(const FockProbe& p, const EngineOptions&, bool) {
    init_single(p.signal);
    weight_ = std::norm(separable_amplitude(p.idler, omega_i_));
  }
  void init(const ClassicalProbe& p, const EngineOptions&, bool) {
    init_single(p.pulse);
  }

  ProbeState state_;
  double omega_i_ = 0.0;
  double omega_pr_ = 0.0;
  double normalization_ = 1.0;
  double weight_ = 1.0;
  std::optional<double> jitter_;
  std::optional<EntangledPairParams> pair_;
  SinglePhotonParams single_{};
  bool has_time_ = false;
  double carrier_ = 0.0;
  double feature_ = 1.0;
  std::pair<double, double> support_{0.0, 0.0};
  double l1_ = 1.0;
  ComplexSpline spline_;
};

namespace detail {

inline std::size_t oscillation_panels(double lo, double hi, double angular,
                                      double feature) {
  const double period =
      std::abs(angular) > 0.0 ? units::two_pi / std::abs(angular) : hi - lo;
  const double panel = std::min(period, 2.0 * feature);
  return static_cast<std::size_t>(
      std::clamp(std::ceil((hi - lo) / panel), 1.0, 4096.0));
}

inline void require_nonnegative_delay(double T) {
  if (!(T >= 0.0)) throw std::invalid_argument("delay T must be >= 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Quantum FAST CARS

/// |Σ_b α*_b ρ_b(T) A(ω − ω_b − iγ_b)|² times the probe weight.
inline double qfastcars_point(const VibrationalModeSet& modes,
                              const PreparedProbe& probe, double omega,
                              double T) {
  detail::require_nonnegative_delay(T);
  complex sum{0.0, 0.0};
  for (const auto& m : modes.modes) {
    sum += std::conj(m.alpha) * vibrational_coherence(m, T) *
           probe.amplitude(complex(omega - m.omega_bg, -m.gamma_bg));
  }
  return std::norm(sum) * probe.weight();
}

inline double qfastcars_point(const VibrationalModeSet& modes,
                              const ProbeState& probe, double omega,
                              double omega_i, double T,
                              const EngineOptions& opts = {}) {
  return qfastcars_point(modes, PreparedProbe(probe, omega_i, opts, false),
                         omega, T);
}

namespace detail {

/// (1/J)∫_0^J f(T+δ)dδ for a real signal f.
template <class F>
double jitter_average(F&& f, double T, double jitter, double rel_tol) {
  if (!(jitter > 0.0)) throw std::invalid_argument("jitter must be > 0");
  double scale = 0.0;
  for (int k = 0; k <= 16; ++k)
    scale = std::max(scale, std::abs(f(T + jitter * k / 16.0)));
  if (scale == 0.0) return 0.0;
  const auto r = integrate_adaptive(
      [&](double d) { return complex(f(T + std::max(d, 0.0)), 0.0); }, 0.0,
      jitter, rel_tol * jitter * scale, {.initial_panels = 64});
  if (!r.converged)
    throw ToleranceNotMet(r.value / jitter, r.error / jitter, rel_tol * scale);
  return r.value.real() / jitter;
}

}  // namespace detail

/// Pseudo-thermal FAST CARS: the entangled signal averaged over a random
/// arrival time δ ∈ [0, jitter].
inline double qfastcars_thermal_point(const VibrationalModeSet& modes,
                                      const EntangledPairParams& params,
                                      double jitter, double omega,
                                      double omega_i, double T,
                                      const EngineOptions& opts = {}) {
  detail::require_nonnegative_delay(T);
  const PreparedProbe probe(EntangledProbe{params}, omega_i, opts, false);
  return detail::jitter_average(
      [&](double t) { return qfastcars_point(modes, probe, omega, t); }, T,
      jitter, std::max(opts.rel_tol, 1e-9));
}

// ---------------------------------------------------------------------------
// QFRS line shapes

/// h(ω,T) = g(ω,T)·e^{−DT²} = ∫dτ e^{iΔτ/ħ} e^{−D(τ+T)²} Φ̃(τ), Δ = detuning.
/// The combined Gaussian keeps the integrand bounded for every T.
inline complex damped_lineshape(const PreparedProbe& probe, double detuning,
                                double D, double T, double rel_tol) {
  if (!probe.has_time_amplitude())
    throw std::logic_error("damped_lineshape: probe prepared without Φ̃");
  auto [lo, hi] = probe.envelope_support();
  if (D > 0.0) {
    const double reach = std::sqrt(-std::log(1e-12) / D);
    lo = std::max(lo, -T - reach);
    hi = std::min(hi, -T + reach);
  }
  if (!(lo < hi)) return {0.0, 0.0};
  const double angular = (detuning - probe.carrier()) / units::hbar;
  auto integrand = [&](double tau) {
    const double shifted = tau + T;
    return std::exp(complex(-D * shifted * shifted, angular * tau)) *
           probe.envelope(tau);
  };
  return adaptive_quadrature(
      integrand, lo, hi, rel_tol * probe.envelope_l1(),
      {.initial_panels = detail::oscillation_panels(lo, hi, angular,
                                                    probe.envelope_feature())});
}

/// Short-delay form of h: A(Δ + 2iDTħ)·e^{−DT²}.
inline complex approximate_damped_lineshape(const PreparedProbe& probe,
                                            double detuning, double D,
                                            double T) {
  return probe.amplitude(complex(detuning, 2.0 * D * T * units::hbar)) *
         std::exp(-D * T * T);
}

/// g_{n,e_j}(ω,T) = ∫dτ e^{i(ω−ω̃−n v_h)τ} e^{−D(τ²+2Tτ)} Φ̃(τ,ωi).
inline complex qfrs_lineshape_g(const ExcitedStateBranch& branch, double v_h,
                                int n, const PreparedProbe& probe, double omega,
                                double T, LineshapeMethod method,
                                double rel_tol = 1e-10) {
  detail::require_nonnegative_delay(T);
  const double detuning = omega - branch.omega_gap - n * v_h;
  if (method == LineshapeMethod::approximation)
    return probe.amplitude(complex(detuning, 2.0 * branch.D * T * units::hbar));
  return damped_lineshape(probe, detuning, branch.D, T, rel_tol) *
         std::exp(branch.D * T * T);
}

inline complex qfrs_lineshape_g(const ExcitedStateBranch& branch, double v_h,
                                int n, const ProbeState& probe, double omega,
                                double omega_i, double T, LineshapeMethod method,
                                const EngineOptions& opts = {}) {
  const PreparedProbe prepared(probe, omega_i, opts,
                               method == LineshapeMethod::quadrature);
  return qfrs_lineshape_g(branch, v_h, n, prepared, omega, T, method,
                          opts.rel_tol);
}

namespace detail {

/// Σ_j Σ_n α*_j ρ^{(n)}_j(T) g_{n,j}(ω,T), with ρ·g regrouped as
/// (ρ0 S_n e^{−i w_n T/ħ}) · h_n so no e^{±DT²} factor appears alone.
inline complex qfrs_amplitude(const VibronicModel& model,
                              const PreparedProbe& probe, double omega,
                              double T, LineshapeMethod method,
                              double rel_tol) {
  require_nonnegative_delay(T);
  complex sum{0.0, 0.0};
  for (const auto& b : model.branches) {
    for (int n = 0; n <= model.n_max; ++n) {
      const double s_n = franck_condon_weight(b.F, n);
      if (s_n == 0.0) continue;
      const double energy = b.omega_gap + n * model.v_h;
      const complex residue = std::conj(b.alpha) * b.rho0 * s_n *
                              std::polar(1.0, -energy * T / units::hbar);
      const double detuning = omega - energy;
      const complex h =
          method == LineshapeMethod::quadrature
              ? damped_lineshape(probe, detuning, b.D, T, rel_tol)
              : approximate_damped_lineshape(probe, detuning, b.D, T);
      sum += residue * h;
    }
  }
  return sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// QFRS signals

/// Intensity-correlated QFRS: |Σ α* g ρ^{(n)}|² times the probe weight.
inline double qfrs_intensity_point(const VibronicModel& model,
                                   const PreparedProbe& probe, double omega,
                                   double T, LineshapeMethod method,
                                   double rel_tol = 1e-10) {
  return std::norm(detail::qfrs_amplitude(model, probe, omega, T, method,
                                          rel_tol)) *
         probe.weight();
}

inline double qfrs_intensity_point(const VibronicModel& model,
                                   const ProbeState& probe, double omega,
                                   double omega_i, double T,
                                   const EngineOptions& opts = {}) {
  const PreparedProbe prepared(probe, omega_i, opts,
                               opts.method == LineshapeMethod::quadrature);
  return qfrs_intensity_point(model, prepared, omega, T, opts.method,
                              opts.rel_tol);
}

struct WeightedTrajectory {
  complex alpha{1.0, 0.0};
  CoherenceTrajectory trajectory;
};

/// Intensity QFRS from arbitrary coherence trajectories via the line-shape
/// double integral f(T) = ∬dτdω′ ρ(τ)e^{i(ω−ω′)(τ−T)}Φ(ω′,ωi). The ω′
/// integral gives 2πΦ̃(τ−T); the remaining τ integral is done by quadrature.
/// Returns |Σ α* f/(2π)|² so it shares the closed-form path's scale.
inline double qfrs_intensity_generic(
    std::span<const WeightedTrajectory> trajectories,
    const PreparedProbe& probe, double omega, double T,
    double rel_tol = 1e-10) {
  detail::require_nonnegative_delay(T);
  if (!probe.has_time_amplitude())
    throw std::logic_error("qfrs_intensity_generic: probe prepared without Φ̃");
  const double angular = (omega - probe.carrier()) / units::hbar;
  complex sum{0.0, 0.0};
  for (const auto& wt : trajectories) {
    auto [lo, hi] = probe.envelope_support();
    const auto [t_lo, t_hi] = wt.trajectory.support();
    lo = std::max(lo, t_lo - T);
    hi = std::min(hi, t_hi - T);
    if (!(lo < hi)) continue;
    double rho_scale = 0.0;
    for (int k = 0; k <= 32; ++k)
      rho_scale = std::max(rho_scale,
                           std::abs(wt.trajectory(lo + T + (hi - lo) * k / 32.0)));
    if (rho_scale == 0.0) continue;
    auto integrand = [&](double u) {
      return wt.trajectory(T + u) * std::polar(1.0, angular * u) *
             probe.envelope(u);
    };
    const complex f_over_2pi = adaptive_quadrature(
        integrand, lo, hi, rel_tol * probe.envelope_l1() * rho_scale,
        {.initial_panels = detail::oscillation_panels(lo, hi, angular,
                                                      probe.envelope_feature())});
    sum += std::conj(wt.alpha) * f_over_2pi;
  }
  return std::norm(sum) * probe.weight();
}

/// Local-oscillator reference Φ_LO = |A(ω̄)|·e^{i(φ+π/2)}: the LO phase sets
/// the phase of the reference amplitude, measured from quadrature.
inline complex local_oscillator(const PreparedProbe& probe,
                                const DetectionConfig& det, double omega) {
  const double omega_bar =
      det.omega_bar_rule == OmegaBarRule::detection ? omega : det.omega_bar;
  return std::abs(probe.amplitude(complex(omega_bar, 0.0))) *
         std::polar(1.0, det.lo_phase + 0.5 * units::pi);
}

/// Heterodyne QFRS: Σ Im[α* ρ^{(n)}(T) g_n(ω,T) Φ_LO*] times the probe weight.
/// Linear in the coherences; takes both signs.
inline double qfrs_heterodyne_point(const VibronicModel& model,
                                    const PreparedProbe& probe,
                                    const DetectionConfig& det, double omega,
                                    double T, LineshapeMethod method,
                                    double rel_tol = 1e-10) {
  const complex sum =
      detail::qfrs_amplitude(model, probe, omega, T, method, rel_tol);
  return (sum * std::conj(local_oscillator(probe, det, omega))).imag() *
         probe.weight();
}

inline double qfrs_heterodyne_point(const VibronicModel& model,
                                    const ProbeState& probe,
                                    const DetectionConfig& det, double omega,
                                    double T, const EngineOptions& opts = {}) {
  det.validate();
  const double omega_i = det.omega_i.value_or(default_idler_energy(probe));
  const PreparedProbe prepared(probe, omega_i, opts,
                               opts.method == LineshapeMethod::quadrature);
  return qfrs_heterodyne_point(model, prepared, det, omega, T, opts.method,
                               opts.rel_tol);
}

// ---------------------------------------------------------------------------
// Grids

using MolecularModel = std::variant<VibrationalModeSet, VibronicModel>;

struct SignalMeta {
  SignalKind kind = SignalKind::fastcars;
  std::string probe;
  std::string model;
  LineshapeMethod method = LineshapeMethod::quadrature;
  double omega_i = 0.0;
  double omega_pr = 0.0;
  double lo_phase = 0.0;
  double normalization = 1.0;  // 𝒩 of the probe state
  double prefactor = 1.0;      // collapsed physical prefactor
  double scale = 1.0;          // divisor applied when normalizing
  bool normalized = false;
};

/// Real signal over (delay × shift); values are row-major, one row per delay.
struct SignalGrid {
  std::vector<double> shift_axis;  // ω − ω_pr, eV
  std::vector<double> delay_axis;  // T, fs
  std::vector<double> values;
  SignalMeta meta;

  double at(std::size_t delay_index, std::size_t shift_index) const {
    return values[delay_index * shift_axis.size() + shift_index];
  }
  std::vector<double> row(std::size_t delay_index) const {
    auto first = values.begin() + static_cast<std::ptrdiff_t>(delay_index * shift_axis.size());
    return {first, first + static_cast<std::ptrdiff_t>(shift_axis.size())};
  }
  std::vector<double> column(std::size_t shift_index) const {
    std::vector<double> c(delay_axis.size());
    for (std::size_t r = 0; r < delay_axis.size(); ++r) c[r] = at(r, shift_index);
    return c;
  }
};

namespace detail {

inline void require_increasing(std::span<const double> axis, const char* name) {
  if (axis.empty())
    throw std::invalid_argument(std::string(name) + " axis is empty");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(axis[i] > axis[i - 1]))
      throw std::invalid_argument(std::string(name) +
                                  " axis must be strictly increasing");
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Evaluates one signal kind over every (shift, delay) pair. Points are
/// independent; rows are distributed over worker threads and written to fixed
/// slots, so the output does not depend on the thread count.
inline SignalGrid scan_grid(SignalKind kind, const MolecularModel& model,
                            const ProbeState& probe, const DetectionConfig& det,
                            std::span<const double> shift_axis,
                            std::span<const double> delay_axis, bool normalize,
                            const EngineOptions& opts = {}) {
  detail::require_increasing(shift_axis, "shift");
  detail::require_increasing(delay_axis, "delay");
  det.validate();
  const bool vib = std::holds_alternative<VibrationalModeSet>(model);
  if (vib != (kind == SignalKind::fastcars))
    throw ValidationError("model", std::string("model block does not match "
                                               "signal kind ") + to_string(kind));
  std::visit([](const auto& m) { m.validate(); }, model);

  const double omega_i = det.omega_i.value_or(default_idler_energy(probe));
  const bool need_time = kind != SignalKind::fastcars &&
                         opts.method == LineshapeMethod::quadrature;
  const PreparedProbe prepared(probe, omega_i, opts, need_time);

  SignalGrid grid;
  grid.shift_axis.assign(shift_axis.begin(), shift_axis.end());
  grid.delay_axis.assign(delay_axis.begin(), delay_axis.end());
  grid.values.assign(shift_axis.size() * delay_axis.size(), 0.0);
  auto& meta = grid.meta;
  meta.kind = kind;
  meta.probe = describe(probe);
  meta.model = std::visit([](const auto& m) { return describe(m); }, model);
  meta.method = opts.method;
  meta.omega_i = omega_i;
  meta.omega_pr = prepared.omega_pr();
  meta.lo_phase = det.lo_phase;
  meta.normalization = prepared.normalization();

  auto entangled_point = [&](double omega, double T) -> double {
    switch (kind) {
      case SignalKind::fastcars:
        return qfastcars_point(std::get<VibrationalModeSet>(model), prepared,
                               omega, T);
      case SignalKind::qfrs_intensity:
        return qfrs_intensity_point(std::get<VibronicModel>(model), prepared,
                                    omega, T, opts.method, opts.rel_tol);
      case SignalKind::qfrs_heterodyne:
        return qfrs_heterodyne_point(std::get<VibronicModel>(model), prepared,
                                     det, omega, T, opts.method, opts.rel_tol);
    }
    return 0.0;
  };
  auto point = [&](double shift, double T) -> double {
    const double omega = prepared.omega_pr() + shift;
    if (const auto jitter = prepared.jitter())
      return detail::jitter_average(
          [&](double t) { return entangled_point(omega, t); }, T, *jitter,
          std::max(opts.rel_tol, 1e-9));
    return entangled_point(omega, T);
  };

  const std::size_t rows = delay_axis.size(), cols = shift_axis.size();
  std::atomic<std::size_t> next_row{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::optional<std::pair<std::size_t, ScanError>> first_error;

  auto worker = [&] {
    for (std::size_t r = next_row++; r < rows && !failed; r = next_row++) {
      for (std::size_t c = 0; c < cols; ++c) {
        try {
          const double v = point(shift_axis[c], delay_axis[r]);
          if (!std::isfinite(v)) throw Error("non-finite signal value");
          grid.values[r * cols + c] = v;
        } catch (const std::exception& e) {
          std::lock_guard lock(error_mutex);
          const std::size_t index = r * cols + c;
          if (!first_error || index < first_error->first)
            first_error.emplace(index, ScanError(r, c, shift_axis[c],
                                                 delay_axis[r], e.what()));
          failed = true;
          return;
        }
      }
    }
  };

  const unsigned n_threads = std::min<unsigned>(
      detail::resolve_threads(opts.threads), static_cast<unsigned>(rows));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (first_error) throw first_error->second;

  if (normalize) {
    double peak = 0.0;
    for (double v : grid.values) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
      for (double& v : grid.values) v /= peak;
      meta.scale = peak;
    }
    meta.normalized = true;
  }
  return grid;
}

}  // namespace qraman
