#include "decolab/spin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decolab/error.hpp"
#include "decolab/random.hpp"

namespace decolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int twice(double j) { return int(std::lround(2.0 * j)); }

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void require_hbar(double hbar) {
  require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::invalid_argument, "hbar must be positive");
}

TimeScale finite_or_infinite(double tau) {
  return std::isfinite(tau) ? TimeScale(tau) : TimeScale::infinite();
}

}  // namespace

void check_spin(double j) {
  require(std::isfinite(j) && j >= 0.5 && std::abs(2.0 * j - std::round(2.0 * j)) < 1e-12,
          ErrorCode::invalid_argument, "spin j must be a positive half-integer");
}

SpinCoherent::SpinCoherent(double j, cplx alpha, double hbar) : j_(j), alpha_(alpha), hbar_(hbar) {
  check_spin(j);
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()),
          ErrorCode::invalid_argument, "coherent-state label must be finite");
  require_hbar(hbar);
}

double SpinCoherent::theta() const { return 2.0 * std::atan(std::abs(alpha_)); }
double SpinCoherent::phi() const { return std::arg(alpha_); }

SpinMatrices spin_matrices(double j, double hbar) {
  check_spin(j);
  require_hbar(hbar);
  const int d = twice(j) + 1;
  OperatorMatrix jz = OperatorMatrix::Zero(d, d), jp = OperatorMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    const double m = j - n;
    jz(n, n) = hbar * m;
    if (n > 0) jp(n - 1, n) = hbar * std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const OperatorMatrix jm = jp.adjoint();
  return {(jp + jm) / 2.0, (jp - jm) / (2.0 * I), jz};
}

StateVector coherent_vector(const SpinCoherent& state) {
  const double j = state.j();
  require(j <= 200.0, ErrorCode::range, "coherent_vector supports j <= 200");
  const int n2 = twice(j);
  const cplx a = state.alpha();
  StateVector v = StateVector::Zero(n2 + 1);
  if (a == cplx{}) {
    v(0) = 1.0;
    return v;
  }
  const double log_r = std::log(std::abs(a));
  const double log_norm = -j * std::log1p(std::norm(a));
  const double ph = std::arg(a);
  for (int n = 0; n <= n2; ++n) {
    const double mag = std::exp(0.5 * log_binomial(n2, n) + n * log_r + log_norm);
    v(n) = std::polar(mag, n * ph);
  }
  return v;
}

StateVector holomorphic_ket(double j, cplx alpha) {
  check_spin(j);
  require(j <= 200.0, ErrorCode::range, "holomorphic_ket supports j <= 200");
  const int n2 = twice(j);
  StateVector v(n2 + 1);
  cplx power = 1.0;
  for (int n = 0; n <= n2; ++n) {
    v(n) = std::exp(0.5 * log_binomial(n2, n)) * power;
    power *= alpha;
  }
  return v;
}

SpinMeans coherent_means(const SpinCoherent& state) {
  const double r = std::norm(state.alpha());
  const double s = state.hbar() * state.j() / (1.0 + r);
  return {2.0 * s * state.alpha().real(), 2.0 * s * state.alpha().imag(), s * (1.0 - r)};
}

SpinSeparations separations(double j, cplx alpha, cplx beta, double hbar) {
  const auto a = coherent_means(SpinCoherent(j, alpha, hbar));
  const auto b = coherent_means(SpinCoherent(j, beta, hbar));
  return {a.mx - b.mx, a.my - b.my, a.mz - b.mz};
}

cplx special_pair(cplx alpha, PairCase which) {
  require(std::isfinite(alpha.real()) && std::isfinite(alpha.imag()),
          ErrorCode::invalid_argument, "coherent-state label must be finite");
  switch (which) {
    case PairCase::i:
      require(alpha != cplx{}, ErrorCode::invalid_argument, "case i needs alpha != 0");
      return 1.0 / std::conj(alpha);
    case PairCase::ii:
      return std::conj(alpha);
    case PairCase::iii:
      require(alpha != cplx{}, ErrorCode::invalid_argument, "case iii needs alpha != 0");
      return 1.0 / alpha;
  }
  throw ValidationError(ErrorCode::invalid_argument, "unknown special pair case");
}

bool case_iv_condition(cplx alpha, cplx beta, double tol) {
  const double phi_a = std::arg(alpha), phi_b = std::arg(beta);
  const double theta_b = 2.0 * std::atan(std::abs(beta));
  return std::abs(std::cos(phi_a) - std::sin(theta_b)) <= tol &&
         std::abs(std::cos(phi_b) - std::sin(phi_a)) <= tol;
}

SpinTimes spin_decoherence_times(double j, cplx alpha, cplx beta, double omega,
                                 const BathMoments& bath, double hbar) {
  bath.validate();
  require(std::isfinite(omega), ErrorCode::invalid_argument, "omega must be finite");
  if (!(bath.var_B > 0.0))
    throw ValidationError(ErrorCode::degenerate_bath, "spin decoherence times need var_B > 0");
  const auto d = separations(j, alpha, beta, hbar);
  const double v = bath.var_B, h2 = hbar * hbar, w2 = omega * omega;
  const double tx = d.d_x == 0.0 ? kInf : hbar / (std::abs(d.d_x) * std::sqrt(v));
  const double ay = d.d_y * d.d_y * w2 * v / (4.0 * h2);
  const double az = d.d_z * d.d_z * w2 * v * v / (36.0 * h2);
  const double ty = ay == 0.0 ? kInf : std::pow(ay, -0.25);
  const double tz = az == 0.0 ? kInf : std::pow(az, -1.0 / 6.0);
  return {finite_or_infinite(tx), finite_or_infinite(ty), finite_or_infinite(tz)};
}

SpinRegime dominant_regime(const SpinSeparations& d, double j, double hbar) {
  // Separations come from differences of O(hbar j) means; anything below
  // roundoff of that scale counts as zero.
  const double zero = 1e-10 * hbar * j;
  if (std::abs(d.d_x) > zero) return SpinRegime::x;
  if (std::abs(d.d_y) > zero) return SpinRegime::y;
  if (std::abs(d.d_z) > zero) return SpinRegime::z;
  return SpinRegime::none;
}

NormEstimate spin_coherence_norm(double t, double j, cplx alpha, cplx beta, double omega,
                                 const BathMoments& bath, double hbar,
                                 const SpinNormOptions& options) {
  require(std::isfinite(t) && t >= 0.0, ErrorCode::range, "time must be finite and >= 0");
  bath.validate();
  require(std::isfinite(omega), ErrorCode::invalid_argument, "omega must be finite");
  const auto d = separations(j, alpha, beta, hbar);

  if (options.mode == SpinNormMode::regime) {
    if (t == 0.0 || bath.var_B == 0.0) return {1.0, 0.0};
    const auto tau = spin_decoherence_times(j, alpha, beta, omega, bath, hbar);
    switch (dominant_regime(d, j, hbar)) {
      case SpinRegime::x: return {std::exp(-std::pow(t / tau.tau_x.value(), 2)), 0.0};
      case SpinRegime::y:
        if (tau.tau_y.is_infinite()) return {1.0, 0.0};
        return {std::exp(-std::pow(t / tau.tau_y.value(), 4)), 0.0};
      case SpinRegime::z:
        if (tau.tau_z.is_infinite()) return {1.0, 0.0};
        return {1.0 / std::sqrt(1.0 + std::pow(t / tau.tau_z.value(), 6)), 0.0};
      case SpinRegime::none: return {1.0, 0.0};
    }
  }

  require(bath.var_Bdot.has_value(), ErrorCode::invalid_argument,
          "Monte-Carlo spin norm needs var_Bdot");
  require(options.samples >= 10000, ErrorCode::range, "Monte-Carlo spin norm needs >= 1e4 samples");
  require(options.partition >= 1, ErrorCode::invalid_argument, "partition size must be >= 1");
  const double sb = std::sqrt(bath.var_B), sbd = std::sqrt(*bath.var_Bdot);
  const double t2 = t * t, t3 = t2 * t, w = omega;
  // Leading-order exponent with the branch means substituted. The second
  // derivative of B has no prescribed statistics and is dropped; the [B, Bdot]
  // term is a c-number and only contributes a phase, which |<.>|^2 removes.
  const auto exponent = [&](double b, double bd) {
    return (d.d_x * (b * t + bd * t2 / 2.0 - w * w * b * t3 / 6.0) -
            d.d_y * w * (b * t2 / 2.0 + bd * t3 / 3.0) + d.d_z * w * b * b * t3 / 12.0) /
           hbar;
  };

  struct Sums {
    double c = 0, s = 0, cc = 0, ss = 0, cs = 0;
  };
  const std::uint64_t n = options.samples, part = options.partition;
  Sums total;
  for (std::uint64_t start = 0; start < n; start += part) {
    // Each sample consumes one Box-Muller pair, i.e. two counter values.
    CounterRng rng(options.seed, 2 * start);
    Sums local;
    const std::uint64_t stop = std::min(n, start + part);
    for (std::uint64_t k = start; k < stop; ++k) {
      const auto [z1, z2] = rng.next_normal_pair();
      const double phi = exponent(sb * z1, sbd * z2);
      const double c = std::cos(phi), s = std::sin(phi);
      local.c += c;
      local.s += s;
      local.cc += c * c;
      local.ss += s * s;
      local.cs += c * s;
    }
    total.c += local.c;
    total.s += local.s;
    total.cc += local.cc;
    total.ss += local.ss;
    total.cs += local.cs;
  }
  const double nn = double(n);
  const double mc = total.c / nn, ms = total.s / nn;
  const double vc = std::max(0.0, total.cc / nn - mc * mc);
  const double vs = std::max(0.0, total.ss / nn - ms * ms);
  const double cov = total.cs / nn - mc * ms;
  // Delta method for |z|^2 = mc^2 + ms^2.
  const double var = 4.0 * (mc * mc * vc + ms * ms * vs + 2.0 * mc * ms * cov) / nn;
  return {mc * mc + ms * ms, std::sqrt(std::max(0.0, var))};
}

double verify_holomorphic_identities(double j, cplx alpha, double step, double hbar) {
  check_spin(j);
  require_hbar(hbar);
  require(step >= 1e-7 && step <= 1e-3, ErrorCode::range, "step must lie in [1e-7, 1e-3]");
  const auto m = spin_matrices(j, hbar);
  const StateVector v = holomorphic_ket(j, alpha);
  const StateVector dv = (holomorphic_ket(j, alpha + step) - holomorphic_ket(j, alpha - step)) /
                         (2.0 * step);
  const cplx a = alpha;
  const StateVector x = (hbar / 2.0) * (2.0 * j * a * v - (a * a - 1.0) * dv);
  const StateVector y = (hbar / (2.0 * I)) * (2.0 * j * a * v - (a * a + 1.0) * dv);
  const StateVector z = hbar * (j * v - a * dv);
  const double scale = v.norm();
  return std::max({(m.jx * v - x).norm(), (m.jy * v - y).norm(), (m.jz * v - z).norm()}) / scale;
}

}  // namespace decolab
