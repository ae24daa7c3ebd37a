#include "decolab/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "decolab/error.hpp"
#include "decolab/fft.hpp"
#include "decolab/numerics.hpp"

namespace decolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_time(double t) {
  require(std::isfinite(t) && t >= 0.0, ErrorCode::range, "time must be finite and >= 0");
}

void require_hbar(double hbar) {
  require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::invalid_argument, "hbar must be positive");
}

TimeScale finite_or_infinite(double tau) {
  return std::isfinite(tau) ? TimeScale(tau) : TimeScale::infinite();
}

}  // namespace

TimeScale::TimeScale(double value) : value_(value) {
  require(std::isfinite(value) && value > 0.0, ErrorCode::range,
          "a finite time scale must be positive");
}

double TimeScale::value() const {
  require(value_.has_value(), ErrorCode::range, "time scale is infinite");
  return *value_;
}

double TimeScale::or_infinity() const { return value_.value_or(kInf); }

void BathMoments::validate() const {
  require(std::isfinite(var_B) && var_B >= 0.0, ErrorCode::invalid_argument,
          "var_B must be finite and >= 0");
  require(!var_Bdot || (std::isfinite(*var_Bdot) && *var_Bdot >= 0.0),
          ErrorCode::invalid_argument, "var_Bdot must be finite and >= 0");
  require(std::isfinite(kappa), ErrorCode::invalid_argument, "kappa must be finite");
}

void CorrelationFunction::check_consistent(const BathMoments& moments) const {
  require(bool(sym), ErrorCode::invalid_argument, "correlation function has no sym part");
  const double s0 = sym(0.0);
  require(std::abs(s0 - 2.0 * moments.var_B) <= 1e-9, ErrorCode::invalid_argument,
          "correlation sym(0) must equal 2 var_B");
}

CorrelationFunction CorrelationFunction::constant(double var_B, double tail_cutoff) {
  require(var_B >= 0.0 && tail_cutoff > 0.0, ErrorCode::invalid_argument,
          "constant correlation needs var_B >= 0 and a positive cutoff");
  return {[var_B](double) { return 2.0 * var_B; }, [](double) { return 0.0; }, tail_cutoff};
}

CorrelationFunction CorrelationFunction::exponential(double var_B, double gamma,
                                                     std::optional<double> tail_cutoff) {
  require(var_B >= 0.0 && gamma > 0.0, ErrorCode::invalid_argument,
          "exponential correlation needs var_B >= 0 and gamma > 0");
  const double cut = tail_cutoff.value_or(40.0 / gamma);
  require(cut > 0.0, ErrorCode::invalid_argument, "tail cutoff must be positive");
  return {[var_B, gamma](double s) { return 2.0 * var_B * std::exp(-gamma * std::abs(s)); },
          [](double) { return 0.0; }, cut};
}

CorrelationFunction CorrelationFunction::gaussian(double var_B, double tau,
                                                  std::optional<double> tail_cutoff) {
  require(var_B >= 0.0 && tau > 0.0, ErrorCode::invalid_argument,
          "gaussian correlation needs var_B >= 0 and tau > 0");
  const double cut = tail_cutoff.value_or(10.0 * tau);
  require(cut > 0.0, ErrorCode::invalid_argument, "tail cutoff must be positive");
  return {[var_B, tau](double s) { return 2.0 * var_B * std::exp(-s * s / (2.0 * tau * tau)); },
          [](double) { return 0.0; }, cut};
}

void SystemParams::validate() const {
  require(mass > 0.0, ErrorCode::invalid_argument, "mass must be positive");
  require(std::isfinite(omega), ErrorCode::invalid_argument, "omega must be finite");
  require_hbar(hbar);
}

DecoherenceTimes decoherence_times(double dq, double dp, const SystemParams& sys,
                                   const BathMoments& bath) {
  sys.validate();
  bath.validate();
  require(std::isfinite(dq) && std::isfinite(dp), ErrorCode::invalid_argument,
          "separations must be finite");
  if (!(bath.var_B > 0.0))
    throw ValidationError(ErrorCode::degenerate_bath, "decoherence times need var_B > 0");
  const double h = sys.hbar, v = bath.var_B, m = sys.mass;
  const double tq = dq == 0.0 ? kInf : h / (std::abs(dq) * std::sqrt(v));
  const double tqp = dq * dp == 0.0 ? kInf : std::cbrt(m * h * h / (std::abs(dq * dp) * v));
  const double tp = dp == 0.0 ? kInf : std::pow(4.0 * m * m * h * h / (dp * dp * v), 0.25);
  return {finite_or_infinite(tq), finite_or_infinite(tqp), finite_or_infinite(tp)};
}

ShortTimeFactors short_time_factors(double t, const Superposition& sup, const SystemParams& sys,
                                    const BathMoments& bath) {
  require_time(t);
  sys.validate();
  bath.validate();
  const double h2 = sys.hbar * sys.hbar, v = bath.var_B, m = sys.mass;
  const double dq = sup.dq(), dp = sup.dp();
  ShortTimeFactors f;
  f.prefactor = 1.0 / std::sqrt(1.0 + 4.0 * sup.sigma() * v * t * t / h2);
  f.e_q = std::exp(-dq * dq * v * t * t / h2);
  if (std::isfinite(m)) {
    f.e_qp = std::exp(-dq * dp * v * t * t * t / (m * h2));
    f.e_p = std::exp(-dp * dp * v * t * t * t * t / (4.0 * m * m * h2));
  }
  return f;
}

double coherence_norm_short_time(double t, const Superposition& sup, const SystemParams& sys,
                                 const BathMoments& bath) {
  return short_time_factors(t, sup, sys, bath).product();
}

DensityBlock evolve_density_short_time(const DensityBlock& block, double t,
                                       const SystemParams& sys, const BathMoments& bath) {
  require_time(t);
  sys.validate();
  bath.validate();
  const int n = block.grid.size();
  require(block.values.rows() == n && block.values.cols() == n, ErrorCode::dimension_mismatch,
          "density block does not match its grid");
  if (t == 0.0 || bath.var_B == 0.0) return block;

  const double dq = block.grid.spacing();
  const double h = sys.hbar, v = bath.var_B;
  const bool moving = std::isfinite(sys.mass);
  const int padded = 2 * n;
  const auto wavenumbers = fft_wavenumbers(padded, dq);

  const double width_k = h / (t * std::sqrt(v));
  if (width_k < 2.0 * dq) {
    std::ostringstream os;
    os << "decoherence factor width " << width_k << " in q - q' spans fewer than 2 grid cells";
    throw NumericalError(ErrorCode::resolution, os.str());
  }
  if (moving) {
    const double width_K = 2.0 * sys.mass / (t * t * std::sqrt(v));
    const double cell_K = wavenumbers[1];
    if (width_K < 2.0 * cell_K) {
      std::ostringstream os;
      os << "diffusion factor width " << width_K << " in K spans fewer than 2 grid cells";
      throw NumericalError(ErrorCode::resolution, os.str());
    }
  }

  DensityBlock out{block.grid, Eigen::MatrixXcd::Zero(n, n)};
  const FftPlan forward(padded, 1, 1, padded, FftDirection::forward);
  const FftPlan backward(padded, 1, 1, padded, FftDirection::backward);
  std::vector<cplx> buf(static_cast<std::size_t>(padded));
  const double c = v / (2.0 * h * h);

  for (int m = -(n - 1); m <= n - 1; ++m) {
    // Elements (a, a - m) share k = m dq; consecutive a step (q + q')/2 by dq.
    const int a0 = std::max(0, m), a1 = std::min(n - 1, n - 1 + m);
    const int len = a1 - a0 + 1;
    bool any = false;
    std::fill(buf.begin(), buf.end(), cplx{});
    for (int i = 0; i < len; ++i) {
      buf[std::size_t(i)] = block.values(a0 + i, a0 + i - m);
      any = any || buf[std::size_t(i)] != cplx{};
    }
    if (!any) continue;
    const double k = m * dq;
    if (!moving) {
      const double f = std::exp(-c * k * k * t * t);
      for (int i = 0; i < len; ++i) out.values(a0 + i, a0 + i - m) = f * buf[std::size_t(i)];
      continue;
    }
    forward.execute(buf.data());
    for (int i = 0; i < padded; ++i) {
      const double s = k * t + h * wavenumbers[std::size_t(i)] * t * t / (2.0 * sys.mass);
      buf[std::size_t(i)] *= std::exp(-c * s * s) / double(padded);
    }
    backward.execute(buf.data());
    for (int i = 0; i < len; ++i) out.values(a0 + i, a0 + i - m) = buf[std::size_t(i)];
  }
  return out;
}

double two_reservoir_norm(double t, double dq, double dp, double var_BQ, double var_BP,
                          double hbar) {
  require_time(t);
  require_hbar(hbar);
  require(var_BQ >= 0.0 && var_BP >= 0.0, ErrorCode::invalid_argument,
          "reservoir variances must be >= 0");
  // (t/tau_Q)^2 with tau_Q = hbar / (|dq| sqrt(var_BQ)), likewise for P.
  const double xq = dq * dq * var_BQ * t * t / (hbar * hbar);
  const double xp = dp * dp * var_BP * t * t / (hbar * hbar);
  return std::exp(-xq) * std::exp(-xp);
}

double memory_kernel_norm(double t, double dq, double hbar, const CorrelationFunction& corr) {
  require_time(t);
  require_hbar(hbar);
  require(bool(corr.sym), ErrorCode::invalid_argument, "correlation function has no sym part");
  const double upper = std::min(t, corr.tail_cutoff);
  if (upper <= 0.0 || dq == 0.0) return 1.0;
  const auto q = integrate([&](double s) { return (t - s) * corr.sym(s); }, 0.0, upper, 1e-10);
  return std::exp(-dq * dq / (hbar * hbar) * q.value);
}

GoldenRuleTimes golden_rule_times(const CorrelationFunction& corr, const SystemParams& sys,
                                  double dq) {
  sys.validate();
  require(bool(corr.sym) && bool(corr.resp), ErrorCode::invalid_argument,
          "correlation function is incomplete");
  const double c = corr.tail_cutoff;
  require(std::isfinite(c) && c > 0.0, ErrorCode::range,
          "golden-rule integrals need a finite positive tail cutoff");
  const double h = sys.hbar, w = sys.omega;
  constexpr double tol = 1e-10;

  GoldenRuleTimes out{TimeScale::infinite(), TimeScale::infinite(), 0.0, 0.0};

  const auto dec = [&](double s) { return 0.5 * corr.sym(s) * std::cos(w * s); };
  const double dec_scale = dq * dq / (h * h);
  const auto qd = integrate(dec, 0.0, c, tol);
  out.dec_truncation =
      dec_scale * integrate([&](double s) { return std::abs(dec(s)); }, c, 2.0 * c, 1e-6).value;
  if (dec_scale > 0.0) {
    if (qd.value < -qd.error)
      throw ValidationError(ErrorCode::range, "golden-rule decoherence rate is negative");
    if (qd.value > qd.error) out.tau_dec = finite_or_infinite(1.0 / (dec_scale * qd.value));
  }

  if (w == 0.0) {
    const auto mag = integrate([&](double s) { return std::abs(corr.resp(s)); }, 0.0, c, 1e-9);
    if (mag.value > mag.error)
      throw ValidationError(ErrorCode::undefined_dissipation,
                            "dissipation time is undefined at omega = 0 with a nonzero response");
    return out;
  }
  const auto diss = [&](double s) { return corr.resp(s) * std::sin(w * s); };
  const double diss_scale = std::isfinite(sys.mass) ? 1.0 / (sys.mass * w) : 0.0;
  const auto qs = integrate(diss, 0.0, c, tol);
  out.diss_truncation = std::abs(diss_scale) *
      integrate([&](double s) { return std::abs(diss(s)); }, c, 2.0 * c, 1e-6).value;
  const double rate = diss_scale * qs.value;
  const double rate_err = std::abs(diss_scale) * qs.error;
  if (rate < -rate_err)
    throw ValidationError(ErrorCode::range, "golden-rule dissipation rate is negative");
  if (rate > rate_err) out.tau_diss = finite_or_infinite(1.0 / rate);
  return out;
}

double transition_separation(double dp, double hbar) {
  require_hbar(hbar);
  require(std::isfinite(dp) && dp != 0.0, ErrorCode::invalid_argument,
          "transition separation needs dp != 0");
  return std::sqrt(hbar * std::abs(dp));
}

double flo_time(double sigma, double d, double v) {
  require(sigma > 0.0 && d > 0.0 && v > 0.0, ErrorCode::invalid_argument,
          "flo_time needs sigma, d, v > 0");
  return sigma / (d * v);
}

}  // namespace decolab
