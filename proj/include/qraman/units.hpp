#pragma once

#include <numbers>

namespace qraman {

/// Fixed unit conventions. Public interfaces take energies in eV and times in
/// fs; phases are E·t/ħ and angular frequencies are rad/fs.
struct UnitSystem {
  static constexpr double hbar = 0.6582119569;  // eV fs
  static constexpr double ev_per_wavenumber = 1.0 / 8065.544;
};

namespace units {

inline constexpr double hbar = UnitSystem::hbar;
inline constexpr double ev_per_wavenumber = UnitSystem::ev_per_wavenumber;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double to_angular(double energy_ev) { return energy_ev / hbar; }
constexpr double to_energy(double angular) { return angular * hbar; }
constexpr double from_wavenumber(double cm) { return cm * ev_per_wavenumber; }
constexpr double to_wavenumber(double energy_ev) {
  return energy_ev / ev_per_wavenumber;
}
constexpr double from_ps(double ps) { return ps * 1000.0; }

}  // namespace units
}  // namespace qraman
