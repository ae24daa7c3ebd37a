#pragma once

#include <cstdint>

#include "decolab/laws.hpp"
#include "decolab/linalg.hpp"

namespace decolab {

/// Spin-j coherent state with stereographic label alpha = e^{i phi} tan(theta/2).
/// The south pole (alpha = infinity) is not representable.
class SpinCoherent {
 public:
  SpinCoherent(double j, cplx alpha, double hbar = 1.0);

  double j() const { return j_; }
  cplx alpha() const { return alpha_; }
  double hbar() const { return hbar_; }
  int dim() const { return int(std::lround(2.0 * j_)) + 1; }
  double theta() const;
  double phi() const;

 private:
  double j_;
  cplx alpha_;
  double hbar_;
};

/// Throws ValidationError unless 2j is a positive integer.
void check_spin(double j);

struct SpinMatrices {
  OperatorMatrix jx, jy, jz;
};

/// Standard matrices in the Jz eigenbasis ordered m = j, j-1, ..., -j.
SpinMatrices spin_matrices(double j, double hbar = 1.0);

/// Normalized coherent state in the Jz eigenbasis (same ordering as
/// spin_matrices). Evaluated in the log domain; j > 200 is rejected.
StateVector coherent_vector(const SpinCoherent& state);

/// Unnormalized holomorphic ket sum_n sqrt(C(2j, n)) alpha^n |j, j-n>.
StateVector holomorphic_ket(double j, cplx alpha);

struct SpinMeans {
  double mx, my, mz;
};

SpinMeans coherent_means(const SpinCoherent& state);

struct SpinSeparations {
  double d_x, d_y, d_z;
};

SpinSeparations separations(double j, cplx alpha, cplx beta, double hbar = 1.0);

enum class PairCase { i, ii, iii };

/// i: 1/conj(alpha) (mirror in the equatorial plane); ii: conj(alpha)
/// (mirror in the xz plane); iii: 1/alpha.
cplx special_pair(cplx alpha, PairCase which);

/// The fourth special case is only available as a predicate, recorded
/// verbatim as "cos phi_alpha = sin theta_beta, cos phi_beta = sin phi_alpha".
/// The printed condition looks garbled; it is not turned into a constructor.
bool case_iv_condition(cplx alpha, cplx beta, double tol = 1e-12);

struct SpinTimes {
  TimeScale tau_x, tau_y, tau_z;
};

/// tau_x = hbar/(|d_x| sqrt<B^2>), tau_y = (d_y^2 Omega^2 <B^2> / 4 hbar^2)^(-1/4),
/// tau_z = (d_z^2 Omega^2 <B^2>^2 / 36 hbar^2)^(-1/6). Infinite where the
/// separation (or Omega, for tau_y and tau_z) vanishes.
SpinTimes spin_decoherence_times(double j, cplx alpha, cplx beta, double omega,
                                 const BathMoments& bath, double hbar = 1.0);

enum class SpinNormMode { regime, montecarlo };

struct NormEstimate {
  double value = 1.0;
  double std_error = 0.0;
};

struct SpinNormOptions {
  SpinNormMode mode = SpinNormMode::regime;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  /// Samples per partition; partitions are summed in a fixed order.
  std::uint64_t partition = 8192;
};

/// Leading-order-in-j coherence norm of the pair (alpha, beta).
NormEstimate spin_coherence_norm(double t, double j, cplx alpha, cplx beta, double omega,
                                 const BathMoments& bath, double hbar,
                                 const SpinNormOptions& options = {});

/// Which of the pure regimes the regime mode uses for a separation triple.
enum class SpinRegime { none, x, y, z };
SpinRegime dominant_regime(const SpinSeparations& d, double j, double hbar);

/// Max over J_x, J_y, J_z of |J ||alpha> - D ||alpha>| / | ||alpha> |, where D
/// is the differential form of the generator with d/dalpha taken by central
/// differences of step `step`.
double verify_holomorphic_identities(double j, cplx alpha, double step, double hbar = 1.0);

}  // namespace decolab
