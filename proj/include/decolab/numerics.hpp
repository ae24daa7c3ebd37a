#pragma once

#include <functional>
#include <span>
#include <vector>

namespace decolab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope*x + intercept.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (15/31) integration of f over [a, b]. Throws
/// NumericalError(integration) when the error estimate exceeds abs_tol.
Quadrature integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol);

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

}  // namespace decolab
