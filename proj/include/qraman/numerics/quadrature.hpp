#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qraman/errors.hpp"

namespace qraman {

struct QuadratureOptions {
  std::size_t initial_panels = 1;
  int max_depth = 50;
  std::size_t max_panels = 20000;
};

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  int depth;
  bool operator<(const Panel& other) const { return error < other.error; }
};

/// Gauss-Kronrod 7/15 on [a,b]; the error is |K15 − G7|.
template <class F>
Panel gk15(F& f, double a, double b, int depth) {
  using boost::math::quadrature::gauss;
  using boost::math::quadrature::gauss_kronrod;
  static const auto& xk = gauss_kronrod<double, 15>::abscissa();
  static const auto& wk = gauss_kronrod<double, 15>::weights();
  static const auto& wg = gauss<double, 7>::weights();

  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const std::complex<double> f0 = f(c);
  std::complex<double> kronrod = wk[0] * f0;
  std::complex<double> gauss_sum = wg[0] * f0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = h * xk[i];
    const std::complex<double> pair = f(c - dx) + f(c + dx);
    kronrod += wk[i] * pair;
    if (i % 2 == 0) gauss_sum += wg[i / 2] * pair;
  }
  kronrod *= h;
  gauss_sum *= h;
  return {a, b, kronrod, std::abs(kronrod - gauss_sum), depth};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of a complex-valued f over
/// [a,b]. Always returns the best estimate; `converged` reports whether the
/// summed error bound reached `tol` before the depth or panel cap.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double tol,
                                    const QuadratureOptions& opts = {}) {
  if (!(a < b)) throw std::invalid_argument("adaptive_quadrature: need a < b");
  if (!(tol > 0.0))
    throw std::invalid_argument("adaptive_quadrature: need tol > 0");

  auto fn = [&f](double x) -> std::complex<double> { return f(x); };
  std::priority_queue<detail::Panel> heap;
  const std::size_t n0 = std::max<std::size_t>(1, opts.initial_panels);
  const double width = (b - a) / static_cast<double>(n0);
  double total_error = 0.0;
  for (std::size_t i = 0; i < n0; ++i) {
    const double lo = a + width * static_cast<double>(i);
    const double hi = (i + 1 == n0) ? b : lo + width;
    auto p = detail::gk15(fn, lo, hi, 0);
    total_error += p.error;
    heap.push(p);
  }
  std::size_t evaluations = 15 * n0;

  bool converged = total_error <= tol;
  while (!converged) {
    const detail::Panel worst = heap.top();
    if (worst.depth >= opts.max_depth || heap.size() >= opts.max_panels) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gk15(fn, worst.a, mid, worst.depth + 1);
    auto right = detail::gk15(fn, mid, worst.b, worst.depth + 1);
    evaluations += 30;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    if (total_error <= tol) {
      // Re-sum to shed accumulated rounding in the running total.
      double exact = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        exact += copy.top().error;
        copy.pop();
      }
      total_error = exact;
      converged = total_error <= tol;
    }
  }

  std::vector<detail::Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const auto& l, const auto& r) { return l.a < r.a; });
  QuadratureResult result;
  result.evaluations = evaluations;
  result.converged = converged;
  for (const auto& p : panels) {
    result.value += p.value;
    result.error += p.error;
  }
  if (!std::isfinite(result.value.real()) || !std::isfinite(result.value.imag()))
    throw Error("adaptive_quadrature: integrand produced a non-finite value");
  return result;
}

/// ∫_a^b f(x) dx with estimated absolute error <= tol, or ToleranceNotMet
/// carrying the best estimate and its bound.
template <class F>
std::complex<double> adaptive_quadrature(F&& f, double a, double b, double tol,
                                         const QuadratureOptions& opts = {}) {
  auto r = integrate_adaptive(std::forward<F>(f), a, b, tol, opts);
  if (!r.converged) throw ToleranceNotMet(r.value, r.error, tol);
  return r.value;
}

}  // namespace qraman
