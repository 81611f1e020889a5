#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace trapnoise {

struct AdaptiveOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-8;
  // Relative target is measured against |I + reference_offset|; lets callers
  // whose quantity of interest is offset + I ask for relative accuracy on it.
  double reference_offset = 0.0;
  std::size_t max_evaluations = 1'000'000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// 21-point Gauss-Kronrod rule on [a, b]; abs_error = |K21 - G10|.
QuadratureResult gauss_kronrod21(const std::function<double(double)>& f, double a, double b);

// Globally adaptive bisection over the panels given by `breakpoints` (sorted,
// at least two). Always returns; check `converged`.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> breakpoints,
                                    const AdaptiveOptions& opts);

}  // namespace trapnoise
