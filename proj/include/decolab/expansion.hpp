#pragma once

#include <functional>

#include "decolab/linalg.hpp"

namespace decolab {

/// H(t) = h0 + h1 t + h2 t^2 / 2.
struct ExpandedHamiltonian {
  OperatorMatrix h0, h1, h2;
  double hbar = 1.0;

  int dim() const { return int(h0.rows()); }
  void validate() const;
  OperatorMatrix at(double t) const { return h0 + h1 * t + h2 * (0.5 * t * t); }
};

using HamiltonianPath = std::function<OperatorMatrix(double)>;

/// Phi(t) = h0 t + h1 t^2/2 + (2 h2 + (i/hbar)[h0, h1]) t^3/12, so that the
/// time-ordered propagator is exp(-i Phi / hbar) up to O(t^4).
OperatorMatrix magnus_exponent(const ExpandedHamiltonian& h, double t);

/// Product of midpoint exponentials exp(-i h((k + 1/2) delta) delta / hbar),
/// later times to the left. Second order in delta.
OperatorMatrix time_ordered_propagator(const HamiltonianPath& h_of_t, double t, int n_steps,
                                       double hbar = 1.0);

/// Q, P act on the system factor and B, Bdot on the bath factor.
ExpandedHamiltonian particle_generators(const OperatorMatrix& Q, const OperatorMatrix& P,
                                        const OperatorMatrix& B, const OperatorMatrix& Bdot,
                                        double mass, double hbar = 1.0);

ExpandedHamiltonian spin_generators(const OperatorMatrix& Jx, const OperatorMatrix& Jy,
                                    const OperatorMatrix& B, const OperatorMatrix& Bdot,
                                    const OperatorMatrix& Bddot, double omega,
                                    double hbar = 1.0);

struct ExpansionError {
  double distance = 0.0;
  /// Estimated error of the reference propagator itself.
  double reference_error = 0.0;
  int n_steps = 0;
};

/// Spectral-norm distance between the converged time-ordered reference and
/// exp(-i Phi(t) / hbar). The reference is Richardson-extrapolated from
/// midpoint products and refined until its own error is below 1e-3 of the
/// reported distance (or below 1e-14 absolute).
ExpansionError expansion_error(const ExpandedHamiltonian& h, const HamiltonianPath& h_of_t,
                               double t, int max_steps = 1 << 16);

}  // namespace decolab
