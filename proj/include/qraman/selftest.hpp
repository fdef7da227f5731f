#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "qraman/molecular_models.hpp"
#include "qraman/numerics/fourier.hpp"
#include "qraman/numerics/quadrature.hpp"
#include "qraman/photon_states.hpp"
#include "qraman/signal_engine.hpp"
#include "qraman/units.hpp"

namespace qraman {

struct SelftestResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

namespace selftest_detail {

/// Φ̃(τ) for ωi = ω0/2: box [0,Ts] blurred by the Gaussian pump envelope.
inline complex time_amplitude_oracle(const EntangledPairParams& p, double tau) {
  const double s = p.sigma0 / units::hbar;
  const double carrier = 0.5 * p.omega0 / units::hbar;
  const complex phase = std::polar(1.0, -carrier * tau);
  if (p.Ts == 0.0)
    return phase * s / std::sqrt(units::two_pi) * std::exp(-0.5 * s * s * tau * tau);
  const double r = 1.0 / std::sqrt(2.0);
  return phase * (std::erf(s * tau * r) - std::erf(s * (tau - p.Ts) * r)) /
         (2.0 * p.Ts);
}

inline double relative(complex a, complex b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace selftest_detail

/// Fast subset of the oracle checks, runnable from the command line.
inline std::vector<SelftestResult> run_selftest() {
  using namespace selftest_detail;
  std::vector<SelftestResult> out;
  auto check = [&](std::string name, double measured, double tol,
                   std::string note = {}) {
    out.push_back({std::move(name), measured <= tol, measured, tol, std::move(note)});
  };

  {
    const auto r = integrate_adaptive(
        [](double x) { return complex(std::exp(-x * x), 0.0); }, -10.0, 10.0, 1e-13);
    check("quadrature: gaussian integral", std::abs(r.value.real() - std::sqrt(units::pi)) /
                                               std::sqrt(units::pi), 1e-12);
  }

  const EntangledPairParams pair;
  {
    const double step = units::hbar / (40.0 * pair.sigma0);
    const auto axis = UniformGrid::linspace(-8.0, 40.0, static_cast<std::size_t>(48.0 / step) + 1);
    const auto ft = two_photon_amplitude_time(pair, 0.5 * pair.omega0, axis);
    double peak = 0.0, err = 0.0;
    for (std::size_t j = 0; j < axis.size; ++j) {
      const complex ref = time_amplitude_oracle(pair, axis[j]);
      peak = std::max(peak, std::abs(ref));
      err = std::max(err, std::abs(ft.values[j] - ref));
    }
    check("time amplitude: FFT vs erf oracle (max error / peak)", err / peak, 1e-6);

    double time_energy = 0.0;
    for (const auto& v : ft.values) time_energy += std::norm(v) * axis.step;
    const auto freq_energy = adaptive_quadrature(
        [&](double w) {
          return complex(std::norm(two_photon_amplitude(pair, w, 0.5 * pair.omega0)), 0.0);
        },
        pair.omega0 * 0.5 - 10.0 * pair.sigma0, pair.omega0 * 0.5 + 10.0 * pair.sigma0,
        1e-12, {.initial_panels = 256});
    check("Parseval: sum|phi|^2 dw = 2 pi sum|phi~|^2 dtau",
          std::abs(freq_energy.real() / units::hbar - units::two_pi * time_energy) /
              (units::two_pi * time_energy),
          1e-6);
  }

  {
    double total = 0.0;
    for (int n = 0; n <= 60; ++n) total += franck_condon_weight(2.2, n);
    check("Franck-Condon weights sum to 1", std::abs(total - 1.0), 1e-12);
    const ExcitedStateBranch b{"e1", 1.8, 2.2, 1.0 / 900.0};
    double worst = 0.0;
    for (double t : {0.0, 7.0, 23.0, 51.0}) {
      const complex closed = b.rho0 * std::exp(complex(-b.D * t * t, -b.omega_gap * t / units::hbar)) *
                             std::exp(b.F * (std::polar(1.0, -0.26 * t / units::hbar) - 1.0));
      worst = std::max(worst, relative(total_vibronic_coherence(b, 0.26, 30, t), closed));
    }
    check("vibronic harmonic sum vs closed form", worst, 1e-12);
  }

  {
    const auto model = nitrostilbene_model();
    const PreparedProbe probe(EntangledProbe{pair}, 0.5 * pair.omega0);
    std::vector<WeightedTrajectory> traj;
    for (const auto& b : model.branches)
      traj.push_back({b.alpha, ClosedFormTrajectory{b, model.v_h, model.n_max, {}}});
    double worst = 0.0;
    for (auto [shift, T] : {std::pair{2.32, 0.0}, std::pair{1.66, 12.5}, std::pair{2.05, 40.0}}) {
      const double w = probe.omega_pr() + shift;
      const double a = qfrs_intensity_point(model, probe, w, T, LineshapeMethod::quadrature);
      const double b = qfrs_intensity_generic(traj, probe, w, T);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    check("line-shape double integral vs closed form", worst, 1e-4);
  }

  {
    ExcitedStateBranch b{"e", 1.8, 0.0, 0.0};
    const PreparedProbe probe(EntangledProbe{pair}, 0.5 * pair.omega0);
    double worst = 0.0;
    for (double shift : {1.7, 1.8, 1.93}) {
      const double w = probe.omega_pr() + shift;
      worst = std::max(worst, relative(qfrs_lineshape_g(b, 0.26, 0, probe, w, 25.0,
                                                        LineshapeMethod::quadrature),
                                       probe.amplitude(w - 1.8)));
    }
    check("undamped line shape equals the spectral amplitude", worst, 1e-6);
  }
  return out;
}

inline bool print_selftest(const std::vector<SelftestResult>& results, std::ostream& os) {
  bool ok = true;
  for (const auto& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << "  (" << r.measured
       << " <= " << r.tolerance << ")\n";
    ok = ok && r.passed;
  }
  return ok;
}

}  // namespace qraman
