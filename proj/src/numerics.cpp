#include "decolab/numerics.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "decolab/error.hpp"

namespace decolab {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::dimension_mismatch, "fit_line: size mismatch");
  const std::size_t n = x.size();
  require(n >= 2, ErrorCode::insufficient_data, "fit_line: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::insufficient_data, "fit_line: abscissae are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = n;
  if (n > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      ssr += r * r;
    }
    fit.slope_stderr = std::sqrt(ssr / double(n - 2) / sxx);
  }
  return fit;
}

Quadrature integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol) {
  if (a == b) return {};
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  // Boost's tolerance is relative. Below about 1e-13 its own error estimate
  // sits at the rounding floor, the target is never met and the bisection
  // runs to full depth, so ask for 1e-12 and judge the returned estimate
  // against the absolute target.
  const double value = gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12, &err);
  if (!std::isfinite(value) || !(err <= abs_tol)) {
    std::ostringstream os;
    os << "quadrature on [" << a << ", " << b << "] did not converge: error estimate "
       << err << " exceeds " << abs_tol;
    throw NumericalError(ErrorCode::integration, os.str());
  }
  return {value, err};
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * double(i) / double(n - 1);
  return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  require(a > 0.0 && b > 0.0, ErrorCode::invalid_argument, "logspace needs positive bounds");
  auto e = linspace(std::log(a), std::log(b), n);
  for (auto& v : e) v = std::exp(v);
  if (n > 1) {
    e.front() = a;
    e.back() = b;
  }
  return e;
}

}  // namespace decolab
