#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "decolab/laws.hpp"
#include "decolab/packets.hpp"

namespace decolab {

enum class ComponentKind { spin_half, oscillator };

/// One bath constituent. Spin-half: B_i = g sigma_x, H_i = (hbar omega / 2)
/// sigma_z. Oscillator (truncated to `levels`): B_i = g (a + a^dagger),
/// H_i = hbar omega a^dagger a. `initial` is the index of the H_i eigenstate
/// the component starts in (0 = spin up, or the Fock number).
struct BathComponent {
  ComponentKind kind = ComponentKind::spin_half;
  double g = 1.0;
  double omega = 0.0;
  int levels = 2;
  int initial = 0;

  int dim() const { return kind == ComponentKind::spin_half ? 2 : levels; }
};

struct BathModel {
  std::vector<BathComponent> components;
  std::size_t dimension_cap = 4096;

  /// Checks the component invariants, the dimension cap, and that every
  /// initial state has a vanishing coupling mean.
  void validate(double hbar = 1.0) const;
  std::size_t dimension() const;

  /// M equal spin-half components with g = sqrt(var_B / M), all frequencies
  /// `omega` and all starting in spin up.
  static BathModel equal_spins(int m, double var_B, double omega = 0.0);
};

/// Dense operators on the full bath space (only for small baths).
struct BathOperators {
  OperatorMatrix B, Bdot, Bddot, H_res;
  StateVector initial;
  BathMoments moments;
  CorrelationFunction corr;
};

BathOperators build_bath_operators(const BathModel& bath, double hbar = 1.0);

/// Moments from the component spectra, without building dense operators.
BathMoments bath_moments(const BathModel& bath, double hbar = 1.0);

/// Exact correlation functions of the bath in its initial state, a finite
/// sum of harmonics. The tail cutoff is infinite: nothing decays.
CorrelationFunction bath_correlation(const BathModel& bath, double hbar = 1.0);

/// Exact <exp(i lambda B)> in the initial state.
cplx bath_characteristic(const BathModel& bath, double lambda);

/// prod_i cos^2(d g_i t / hbar) for spin-half baths.
double static_bath_norm(double d, const BathModel& bath, double t, double hbar = 1.0);

struct GridParticle {
  PositionGrid grid;
  /// Infinite mass freezes the particle (no kinetic term).
  double mass = 1.0;
  std::optional<double> harmonic_omega;
};

struct SpinSystem {
  double j = 0.5;
  /// H_sys = omega J_z.
  double omega = 0.0;
};

struct SystemSpec {
  std::variant<SpinSystem, GridParticle> kind;
  double hbar = 1.0;

  int dim() const;
};

struct NormCurve {
  std::vector<double> times;
  std::vector<double> values;
  std::string fingerprint;
};

struct EvolveOptions {
  /// Upper bound on the split-step size. Ignored when H_sys = 0, where
  /// the interaction step is exact.
  double max_step = 1e-3;
  std::size_t combined_cap = std::size_t(1) << 22;
};

/// Grid amplitudes scaled by sqrt(spacing) so the vector has unit norm.
StateVector grid_state(const GaussianPacket& packet, const PositionGrid& grid);
/// A unit vector on one grid point.
StateVector point_state(const PositionGrid& grid, double q);

/// Evolves branch_k (x) bath under H_sys + H_res + X (x) B, X the position or
/// J_x, and returns N_12(t) = |Tr_bath |Psi_1><Psi_2| |^2_F at each time.
/// Spin branches are given in the J_z eigenbasis of spin_matrices.
NormCurve evolve_norm(const SystemSpec& sys, const BathModel& bath, const StateVector& branch1,
                      const StateVector& branch2, const std::vector<double>& times,
                      const EvolveOptions& options = {});

struct DecayFit {
  double n = 0.0;
  double tau = 0.0;
  double n_stderr = 0.0;
  std::size_t points = 0;
};

/// Fits log(-log N) = n log t - n log tau over the points with lo < N < hi.
DecayFit fit_decay_exponent(const NormCurve& curve, double lo = 0.05, double hi = 0.95);

/// Same window, exponent held at n; returns the fitted tau.
double fit_decay_time(const NormCurve& curve, double n, double lo = 0.05, double hi = 0.95);

/// First time at which the curve drops to `level`, by linear interpolation.
double crossing_time(const NormCurve& curve, double level);

}  // namespace decolab
