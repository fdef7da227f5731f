#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qraman {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampled spectrum does not fall off at the window edges; the frequency
/// window is too narrow for a faithful continuous transform.
class NonDecayingSpectrum : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(std::complex<double> estimate, double error_bound,
                  double tolerance)
      : Error("adaptive quadrature: error bound " +
              std::to_string(error_bound) + " exceeds tolerance " +
              std::to_string(tolerance)),
        estimate_(estimate),
        error_bound_(error_bound) {}

  std::complex<double> estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  std::complex<double> estimate_;
  double error_bound_;
};

/// Complex-frequency evaluation of the two-photon amplitude would overflow
/// (γ·Ts or D·T·Ts too large).
class AmplitudeOverflow : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A grid point failed; carries the coordinates of the failing point.
class ScanError : public Error {
 public:
  ScanError(std::size_t row, std::size_t col, double shift, double delay,
            const std::string& cause)
      : Error("scan failed at shift=" + std::to_string(shift) +
              " eV, delay=" + std::to_string(delay) + " fs (row " +
              std::to_string(row) + ", col " + std::to_string(col) +
              "): " + cause),
        row_(row),
        col_(col),
        shift_(shift),
        delay_(delay) {}

  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }
  double shift() const { return shift_; }
  double delay() const { return delay_; }

 private:
  std::size_t row_, col_;
  double shift_, delay_;
};

}  // namespace qraman
