#pragma once

#include <functional>
#include <optional>

#include "decolab/packets.hpp"

namespace decolab {

/// A positive time that may be infinite. Infinity is a state of the value,
/// not a magic number, so arithmetic on it has to be explicit.
class TimeScale {
 public:
  explicit TimeScale(double value);
  static TimeScale infinite() { return TimeScale(); }

  bool is_infinite() const { return !value_; }
  /// Throws ValidationError(range) when infinite.
  double value() const;
  /// The finite value, or +inf. For printing and comparisons only.
  double or_infinity() const;

  bool operator==(const TimeScale&) const = default;

 private:
  TimeScale() = default;
  std::optional<double> value_;
};

struct BathMoments {
  double var_B = 0.0;
  std::optional<double> var_Bdot;
  /// [B, Bdot] is modelled as i hbar kappa times the identity.
  double kappa = 0.0;

  void validate() const;
};

/// Stationary correlations of the coupling agent in the initial bath state.
/// sym(s) = <{B(s), B}>, resp(s) = <(i/hbar)[B(s), B]>. Both are treated as
/// zero beyond tail_cutoff.
struct CorrelationFunction {
  std::function<double(double)> sym;
  std::function<double(double)> resp;
  double tail_cutoff = 0.0;

  /// Throws ValidationError unless sym(0) = 2 var_B within 1e-9.
  void check_consistent(const BathMoments& moments) const;

  static CorrelationFunction constant(double var_B, double tail_cutoff);
  /// sym(s) = 2 var_B exp(-gamma s); default cutoff 40/gamma.
  static CorrelationFunction exponential(double var_B, double gamma,
                                         std::optional<double> tail_cutoff = {});
  /// sym(s) = 2 var_B exp(-s^2 / (2 tau^2)); default cutoff 10 tau.
  static CorrelationFunction gaussian(double var_B, double tau,
                                      std::optional<double> tail_cutoff = {});
};

struct SystemParams {
  double mass = 1.0;
  /// Oscillator frequency; used only by the golden-rule comparison.
  double omega = 0.0;
  double hbar = 1.0;

  void validate() const;
};

struct DecoherenceTimes {
  TimeScale tau_q, tau_qp, tau_p;
};

DecoherenceTimes decoherence_times(double dq, double dp, const SystemParams& sys,
                                   const BathMoments& bath);

/// The four factors of the short-time coherence norm.
struct ShortTimeFactors {
  double prefactor = 1.0;  // (1 + 4 sigma <B^2> t^2 / hbar^2)^(-1/2)
  double e_q = 1.0;        // exp(-dq^2 <B^2> t^2 / hbar^2)
  double e_qp = 1.0;       // exp(-dq dp <B^2> t^3 / (M hbar^2)), signed
  double e_p = 1.0;        // exp(-dp^2 <B^2> t^4 / (4 M^2 hbar^2))

  double product() const { return prefactor * e_q * e_qp * e_p; }
};

ShortTimeFactors short_time_factors(double t, const Superposition& sup, const SystemParams& sys,
                                    const BathMoments& bath);

double coherence_norm_short_time(double t, const Superposition& sup, const SystemParams& sys,
                                 const BathMoments& bath);

/// Applies the short-time decoherence map to a density block. Each diagonal
/// q - q' = k of the block is Fourier transformed along (q + q')/2 and
/// multiplied by exp(-<B^2> (k t + hbar K t^2 / 2M)^2 / (2 hbar^2)), the
/// product of the position, cross and momentum factors.
DensityBlock evolve_density_short_time(const DensityBlock& block, double t,
                                       const SystemParams& sys, const BathMoments& bath);

double two_reservoir_norm(double t, double dq, double dp, double var_BQ, double var_BP,
                          double hbar);

/// exp(-(dq^2/hbar^2) * int_0^t (t - s) sym(s) ds).
double memory_kernel_norm(double t, double dq, double hbar, const CorrelationFunction& corr);

struct GoldenRuleTimes {
  TimeScale tau_dec;
  TimeScale tau_diss;
  /// Bound on the neglected tails: int_c^{2c} |integrand| for each rate
  /// integral (in rate units), c = tail_cutoff.
  double dec_truncation = 0.0;
  double diss_truncation = 0.0;
};

GoldenRuleTimes golden_rule_times(const CorrelationFunction& corr, const SystemParams& sys,
                                  double dq);

double transition_separation(double dp, double hbar);

/// sigma / (d v) with sigma the squared packet width.
double flo_time(double sigma, double d, double v);

}  // namespace decolab
