#pragma once

#include <complex>

namespace qraman {

/// sin(z)/z on the whole complex plane; series branch near the origin.
inline std::complex<double> complex_sinc(std::complex<double> z) {
  if (std::abs(z) < 1e-4) {
    const auto z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

}  // namespace qraman
