#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <variant>

#include "qraman/errors.hpp"
#include "qraman/numerics/fourier.hpp"
#include "qraman/numerics/quadrature.hpp"
#include "qraman/numerics/sampled.hpp"
#include "qraman/numerics/sinc.hpp"
#include "qraman/units.hpp"

namespace qraman {

using complex = std::complex<double>;

/// Degenerate SPDC pair: each arm centred at omega0/2.
struct EntangledPairParams {
  double omega0 = 3.0;   // pump centre, eV
  double sigma0 = 0.82;  // pump bandwidth, eV
  double Ts = 30.0;      // s-arm entanglement time, fs
  double Ti = 30.0;      // idler-arm entanglement time, fs

  void validate() const {
    if (!(omega0 > 0.0)) throw ValidationError("omega0", "must be > 0");
    if (!(sigma0 > 0.0)) throw ValidationError("sigma0", "must be > 0");
    if (!(Ts >= 0.0)) throw ValidationError("Ts", "must be >= 0");
    if (!(Ti >= 0.0)) throw ValidationError("Ti", "must be >= 0");
  }
};

struct SinglePhotonParams {
  double center = 1.5;  // eV
  double sigma = 0.82;  // eV

  void validate() const {
    if (!(center > 0.0)) throw ValidationError("center", "must be > 0");
    if (!(sigma > 0.0)) throw ValidationError("sigma", "must be > 0");
  }
};

struct EntangledProbe {
  EntangledPairParams pair;
};
/// Fully separable |1_s>|1_i> Fock pair.
struct FockProbe {
  SinglePhotonParams signal;
  SinglePhotonParams idler;
};
struct ClassicalProbe {
  SinglePhotonParams pulse;
};
/// Frequency-diagonal mixture of the pair with a random arrival time spread
/// uniformly over [0, jitter] fs.
struct PseudoThermalProbe {
  EntangledPairParams pair;
  double jitter = 30.0;
};

using ProbeState =
    std::variant<EntangledProbe, FockProbe, ClassicalProbe, PseudoThermalProbe>;

inline void validate(const ProbeState& probe) {
  std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, EntangledProbe>) {
          p.pair.validate();
        } else if constexpr (std::is_same_v<T, FockProbe>) {
          p.signal.validate();
          p.idler.validate();
        } else if constexpr (std::is_same_v<T, ClassicalProbe>) {
          p.pulse.validate();
        } else {
          p.pair.validate();
          if (!(p.jitter >= 0.0)) throw ValidationError("jitter", "must be >= 0");
        }
      },
      probe);
}

inline std::string describe(const ProbeState& probe) {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      [&os](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, EntangledProbe>) {
          os << "entangled(omega0=" << p.pair.omega0
             << " eV, sigma0=" << p.pair.sigma0 << " eV, Ts=" << p.pair.Ts
             << " fs, Ti=" << p.pair.Ti << " fs)";
        } else if constexpr (std::is_same_v<T, FockProbe>) {
          os << "fock(signal center=" << p.signal.center
             << " eV sigma=" << p.signal.sigma
             << " eV; idler center=" << p.idler.center
             << " eV sigma=" << p.idler.sigma << " eV)";
        } else if constexpr (std::is_same_v<T, ClassicalProbe>) {
          os << "classical(center=" << p.pulse.center
             << " eV, sigma=" << p.pulse.sigma << " eV)";
        } else {
          os << "pseudo-thermal(omega0=" << p.pair.omega0
             << " eV, sigma0=" << p.pair.sigma0 << " eV, Ts=" << p.pair.Ts
             << " fs, Ti=" << p.pair.Ti << " fs, jitter=" << p.jitter
             << " fs)";
        }
      },
      probe);
  return os.str();
}

/// Idler detection energy used when none is configured.
inline double default_idler_energy(const ProbeState& probe) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FockProbe>)
          return p.idler.center;
        else if constexpr (std::is_same_v<T, ClassicalProbe>)
          return 0.0;
        else
          return 0.5 * p.pair.omega0;
      },
      probe);
}

/// Probe frequency ω_pr = ω0 − ω_i. For separable states the pair "pump"
/// is the sum of the photon centres; for a classical pulse it is the pulse
/// centre.
inline double probe_frequency(const ProbeState& probe, double omega_i) {
  return std::visit(
      [omega_i](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, FockProbe>)
          return p.signal.center + p.idler.center - omega_i;
        else if constexpr (std::is_same_v<T, ClassicalProbe>)
          return p.pulse.center;
        else
          return p.pair.omega0 - omega_i;
      },
      probe);
}

/// Peak-normalized Gaussian pump envelope E0 of the sum frequency.
inline complex pump_envelope(const EntangledPairParams& params,
                             complex omega_sum) {
  const complex x = (omega_sum - params.omega0) / params.sigma0;
  return std::exp(-0.5 * x * x);
}

/// Two-photon amplitude Φ(ωs, ωi) = E0(ωs+ωi)·sinc(ΔkL/2)·e^{iΔkL/2},
/// analytically continued in ωs.
inline complex two_photon_amplitude(const EntangledPairParams& params,
                                    complex omega_s, double omega_i) {
  const double half_max_t = 0.5 * std::max(params.Ts, params.Ti);
  if (std::abs(omega_s.imag()) / units::hbar * half_max_t >= 700.0)
    throw AmplitudeOverflow(
        "two_photon_amplitude: |Im(omega_s)|*max(Ts,Ti)/(2 hbar) >= 700");
  const double center = 0.5 * params.omega0;
  const complex phase_mismatch =
      ((omega_s - center) * params.Ts + (omega_i - center) * params.Ti) /
      units::hbar;
  const complex half = 0.5 * phase_mismatch;
  return pump_envelope(params, omega_s + omega_i) * complex_sinc(half) *
         std::exp(complex(0.0, 1.0) * half);
}

inline complex separable_amplitude(const SinglePhotonParams& params,
                                   complex omega) {
  const complex x = (omega - params.center) / params.sigma;
  return std::exp(-0.5 * x * x);
}

/// Support of the time amplitude Φ̃(τ, ωi): the sinc-phase factor is a box on
/// [0, Ts] smeared by the pump envelope of duration ħ/σ0.
inline std::pair<double, double> time_amplitude_support(
    const EntangledPairParams& params, double envelope_widths) {
  const double w = envelope_widths * units::hbar / params.sigma0;
  return {-w, params.Ts + w};
}

/// Φ̃(τ, ωi) = (1/2π)∫Φ(ω, ωi)e^{−iωτ}dω sampled on tau_axis, computed by FFT
/// of the sampled spectrum. The FFT grid is refined by an integer factor so
/// its samples land exactly on tau_axis.
inline SampledComplexFunction two_photon_amplitude_time(
    const EntangledPairParams& params, double omega_i,
    const UniformGrid& tau_axis, double carrier_shift = 0.0) {
  params.validate();
  const auto [need_lo, need_hi] = time_amplitude_support(params, 6.0);
  if (tau_axis.front() > need_lo || tau_axis.back() < need_hi)
    throw std::invalid_argument(
        "two_photon_amplitude_time: tau axis must cover [-6 hbar/sigma0, "
        "Ts + 6 hbar/sigma0]");

  const double half_window = 8.0 * params.sigma0;  // eV about the E0 peak
  const double max_step = units::pi * units::hbar / half_window;
  const double requested_step = tau_axis.size > 1 ? tau_axis.step : max_step;
  const auto refine = static_cast<std::size_t>(
      std::max(1.0, std::ceil(requested_step / max_step - 1e-12)));
  const double d_tau = requested_step / static_cast<double>(refine);

  // Periodic images of the support must not land on the requested axis.
  const auto [sup_lo, sup_hi] = time_amplitude_support(params, 9.0);
  const double span = std::max({sup_hi - tau_axis.front(),
                                tau_axis.back() - sup_lo,
                                tau_axis.back() - tau_axis.front()}) +
                      d_tau;
  const std::size_t n = next_pow2(std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil(span / d_tau)) + 1,
      (tau_axis.size - 1) * refine + 1));

  const double d_e = units::two_pi * units::hbar / (static_cast<double>(n) * d_tau);
  const double center = params.omega0 - omega_i - carrier_shift;
  const UniformGrid freq(center - static_cast<double>(n / 2) * d_e, d_e, n);
  std::vector<complex> spectrum(n);
  for (std::size_t k = 0; k < n; ++k)
    spectrum[k] = two_photon_amplitude(params, freq[k] + carrier_shift, omega_i);

  const auto full = fourier_to_time(
      SampledComplexFunction(freq, std::move(spectrum), AxisKind::frequency),
      tau_axis.front());
  std::vector<complex> out(tau_axis.size);
  for (std::size_t j = 0; j < tau_axis.size; ++j) out[j] = full.values[j * refine];
  return {tau_axis, std::move(out), AxisKind::time};
}

/// 𝒩 = ∬|Φ(ωs,ωi)|² dωs dωi (eV²) over the strip |ωs − ωi| <= window.
/// Φ depends on ωs+ωi alone when Ts = Ti, so the unrestricted plane integral
/// diverges; the strip plays the role of the difference-frequency acceptance.
inline double normalization(const EntangledPairParams& params,
                            double window = 1.0, double rel_tol = 1e-9) {
  params.validate();
  if (!(window > 0.0)) throw ValidationError("window", "must be > 0");
  const double center = 0.5 * params.omega0;
  // |E0| > 1e-8 of peak  <=>  |u| < σ0·sqrt(2 ln 1e8)
  const double u_max = params.sigma0 * std::sqrt(2.0 * std::log(1e8));
  const double scale = 2.0 * u_max * window;
  const double tol = rel_tol * scale;

  auto intensity = [&](double u, double v) {
    const double xs = 0.5 * (u + v), xi = 0.5 * (u - v);
    return std::norm(two_photon_amplitude(params, complex(center + xs, 0.0),
                                          center + xi));
  };
  const double lobe =
      units::two_pi * units::hbar / std::max(1e-300, 0.5 * (params.Ts + params.Ti));
  const auto inner_panels = static_cast<std::size_t>(
      std::clamp(std::ceil(2.0 * u_max / lobe), 1.0, 4096.0));
  const double lobe_v =
      units::two_pi * units::hbar /
      std::max(1e-300, 0.5 * std::abs(params.Ts - params.Ti));
  const auto outer_panels = static_cast<std::size_t>(
      std::clamp(std::ceil(2.0 * window / lobe_v), 1.0, 4096.0));

  auto inner = [&](double v) {
    return adaptive_quadrature(
        [&](double u) { return complex(intensity(u, v), 0.0); }, -u_max, u_max,
        tol / (4.0 * window), {.initial_panels = inner_panels});
  };
  const complex total = adaptive_quadrature(inner, -window, window, tol,
                                            {.initial_panels = outer_panels});
  return 0.5 * total.real();
}

}  // namespace qraman
