#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "qraman/errors.hpp"
#include "qraman/numerics/sampled.hpp"
#include "qraman/units.hpp"

namespace qraman {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};

/// Unnormalized DFT: out[k] = sum_j in[j] exp(sign*2πi jk/N).
inline std::vector<std::complex<double>> dft(
    const std::vector<std::complex<double>>& in, int sign) {
  const std::size_t n = in.size();
  std::unique_ptr<fftw_complex, FftwFree> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  std::unique_ptr<fftw_plan_s, FftwPlanDestroy> plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan.reset(fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), sign,
                                FFTW_ESTIMATE));
  }
  auto* data = reinterpret_cast<std::complex<double>*>(buf.get());
  std::copy(in.begin(), in.end(), data);
  fftw_execute(plan.get());
  return {data, data + n};
}

}  // namespace detail

/// Continuous transform (1/2π)∫Φ(ω)e^{−iωτ}dω of a frequency-sampled function.
///
/// The frequency axis is in eV and the transform variable is ω = E/ħ, so the
/// returned time axis (fs) has spacing 2π/(N·Δω) and starts at time_origin
/// (default: centred, −N/2 samples). The sample spacing factor Δω/2π and the
/// phase of the non-zero frequency origin are applied explicitly.
inline SampledComplexFunction fourier_to_time(
    const SampledComplexFunction& spectrum,
    double time_origin = std::numeric_limits<double>::quiet_NaN()) {
  const std::size_t n = spectrum.size();
  if (n < 2) throw std::invalid_argument("fourier_to_time: need >= 2 samples");
  const double d_omega = spectrum.axis.step / units::hbar;
  const double omega_start = spectrum.axis.start / units::hbar;
  const double d_tau = units::two_pi / (static_cast<double>(n) * d_omega);
  if (std::isnan(time_origin))
    time_origin = -static_cast<double>(n / 2) * d_tau;
  const UniformGrid time_axis(time_origin, d_tau, n);

  double peak = 0.0;
  for (const auto& v : spectrum.values) peak = std::max(peak, std::abs(v));
  if (peak == 0.0)
    return {time_axis, std::vector<std::complex<double>>(n), AxisKind::time};
  const double edge = 1e-10 * peak;
  if (std::abs(spectrum.values.front()) > edge ||
      std::abs(spectrum.values.back()) > edge)
    throw NonDecayingSpectrum(
        "fourier_to_time: spectrum does not decay below 1e-10 of its peak at "
        "the window edges; widen the frequency window");

  std::vector<std::complex<double>> work(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = -static_cast<double>(k) * d_omega * time_origin;
    work[k] = spectrum.values[k] * std::polar(1.0, phase);
  }
  auto out = detail::dft(work, FFTW_FORWARD);
  const double scale = d_omega / units::two_pi;
  for (std::size_t j = 0; j < n; ++j)
    out[j] *= scale * std::polar(1.0, -omega_start * time_axis[j]);
  return {time_axis, std::move(out), AxisKind::time};
}

/// Inverse of fourier_to_time: Φ(ω) = ∫Φ̃(τ)e^{iωτ}dτ on the conjugate
/// frequency grid starting at frequency_origin (eV).
inline SampledComplexFunction fourier_to_frequency(
    const SampledComplexFunction& signal, double frequency_origin) {
  const std::size_t n = signal.size();
  if (n < 2)
    throw std::invalid_argument("fourier_to_frequency: need >= 2 samples");
  const double d_tau = signal.axis.step;
  const double tau_start = signal.axis.start;
  const double d_omega = units::two_pi / (static_cast<double>(n) * d_tau);
  const double omega_start = frequency_origin / units::hbar;
  const UniformGrid freq_axis(frequency_origin, d_omega * units::hbar, n);

  std::vector<std::complex<double>> work(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double phase = omega_start * static_cast<double>(j) * d_tau;
    work[j] = signal.values[j] * std::polar(1.0, phase);
  }
  auto out = detail::dft(work, FFTW_BACKWARD);
  for (std::size_t k = 0; k < n; ++k) {
    const double omega = omega_start + static_cast<double>(k) * d_omega;
    out[k] *= d_tau * std::polar(1.0, omega * tau_start);
  }
  return {freq_axis, std::move(out), AxisKind::frequency};
}

/// Smallest power of two >= n.
constexpr std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace qraman
