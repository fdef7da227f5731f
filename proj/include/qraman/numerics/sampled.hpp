#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace qraman {

/// Uniformly spaced axis: start + i*step for i in [0, size).
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  UniformGrid() = default;
  UniformGrid(double start_, double step_, std::size_t size_)
      : start(start_), step(step_), size(size_) {
    if (size == 0) throw std::invalid_argument("UniformGrid: empty axis");
    if (size > 1 && !(step > 0.0))
      throw std::invalid_argument("UniformGrid: axis must be increasing");
  }

  /// count points spanning [lo, hi] inclusive.
  static UniformGrid linspace(double lo, double hi, std::size_t count) {
    if (count == 0) throw std::invalid_argument("linspace: count must be >= 1");
    if (count == 1) return UniformGrid(lo, 1.0, 1);
    if (!(hi > lo)) throw std::invalid_argument("linspace: hi must exceed lo");
    return UniformGrid(lo, (hi - lo) / static_cast<double>(count - 1), count);
  }

  /// Rejects non-uniform input (spacing must agree to 1e-12 relative).
  static UniformGrid from_samples(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("from_samples: empty axis");
    if (samples.size() == 1) return UniformGrid(samples[0], 1.0, 1);
    const double step = (samples.back() - samples.front()) /
                        static_cast<double>(samples.size() - 1);
    if (!(step > 0.0))
      throw std::invalid_argument("from_samples: axis not strictly increasing");
    const double scale =
        std::max({std::abs(samples.front()), std::abs(samples.back()), step});
    for (std::size_t i = 1; i < samples.size(); ++i) {
      const double d = samples[i] - samples[i - 1];
      if (!(d > 0.0))
        throw std::invalid_argument("from_samples: axis not strictly increasing");
      const double expected = samples.front() + step * static_cast<double>(i);
      if (std::abs(samples[i] - expected) > 1e-12 * scale * static_cast<double>(i + 1))
        throw std::invalid_argument("from_samples: axis spacing not uniform");
    }
    return UniformGrid(samples.front(), step, samples.size());
  }

  double operator[](std::size_t i) const {
    return start + step * static_cast<double>(i);
  }
  double front() const { return start; }
  double back() const { return (*this)[size - 1]; }

  std::vector<double> values() const {
    std::vector<double> v(size);
    for (std::size_t i = 0; i < size; ++i) v[i] = (*this)[i];
    return v;
  }
};

enum class AxisKind { frequency, time };

/// Complex samples on a uniform axis: eV for frequency, fs for time.
struct SampledComplexFunction {
  UniformGrid axis;
  std::vector<std::complex<double>> values;
  AxisKind kind = AxisKind::frequency;

  SampledComplexFunction() = default;
  SampledComplexFunction(UniformGrid axis_,
                         std::vector<std::complex<double>> values_,
                         AxisKind kind_)
      : axis(axis_), values(std::move(values_)), kind(kind_) {
    if (values.size() != axis.size)
      throw std::invalid_argument(
          "SampledComplexFunction: values length differs from axis length");
  }

  std::size_t size() const { return values.size(); }
};

/// C2 cubic B-spline through complex samples on a uniform grid. Evaluates to
/// zero outside [front, back].
class ComplexSpline {
 public:
  ComplexSpline() = default;

  explicit ComplexSpline(const SampledComplexFunction& f)
      : lo_(f.axis.front()), hi_(f.axis.back()) {
    if (f.size() < 4)
      throw std::invalid_argument("ComplexSpline: need at least 4 samples");
    std::vector<double> re(f.size()), im(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      re[i] = f.values[i].real();
      im[i] = f.values[i].imag();
    }
    re_ = std::make_shared<Spline>(re.data(), re.size(), f.axis.start,
                                   f.axis.step);
    im_ = std::make_shared<Spline>(im.data(), im.size(), f.axis.start,
                                   f.axis.step);
  }

  std::complex<double> operator()(double x) const {
    if (!re_ || x < lo_ || x > hi_) return {0.0, 0.0};
    return {(*re_)(x), (*im_)(x)};
  }

  double lower() const { return lo_; }
  double upper() const { return hi_; }

 private:
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  std::shared_ptr<const Spline> re_, im_;
  double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace qraman
