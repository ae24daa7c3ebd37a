#include "decolab/expansion.hpp"

#include <cmath>
#include <sstream>

#include "decolab/error.hpp"

namespace decolab {

void ExpandedHamiltonian::validate() const {
  check_operator(h0, "h0");
  check_operator(h1, "h1");
  check_operator(h2, "h2");
  require(h1.rows() == h0.rows() && h2.rows() == h0.rows(), ErrorCode::dimension_mismatch,
          "expanded Hamiltonian coefficients differ in dimension");
  require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::invalid_argument, "hbar must be positive");
}

OperatorMatrix magnus_exponent(const ExpandedHamiltonian& h, double t) {
  h.validate();
  require(std::isfinite(t) && t >= 0.0, ErrorCode::range, "time must be finite and >= 0");
  const OperatorMatrix third = 2.0 * h.h2 + (I / h.hbar) * commutator(h.h0, h.h1);
  return h.h0 * t + h.h1 * (t * t / 2.0) + third * (t * t * t / 12.0);
}

OperatorMatrix time_ordered_propagator(const HamiltonianPath& h_of_t, double t, int n_steps,
                                       double hbar) {
  require(n_steps >= 1, ErrorCode::invalid_argument, "n_steps must be >= 1");
  require(std::isfinite(t) && t >= 0.0, ErrorCode::range, "time must be finite and >= 0");
  require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::invalid_argument, "hbar must be positive");
  const double delta = t / n_steps;
  OperatorMatrix u;
  for (int k = 0; k < n_steps; ++k) {
    const OperatorMatrix h = h_of_t((k + 0.5) * delta);
    check_operator(h, "h(t)");
    if (k == 0) u = OperatorMatrix::Identity(h.rows(), h.cols());
    require(h.rows() == u.rows(), ErrorCode::dimension_mismatch, "h(t) changes dimension");
    const OperatorMatrix step =
        is_hermitian(h) ? unitary_exp(h, delta / hbar) : expm((-I * (delta / hbar)) * h);
    u = step * u;
  }
  return u;
}

ExpandedHamiltonian particle_generators(const OperatorMatrix& Q, const OperatorMatrix& P,
                                        const OperatorMatrix& B, const OperatorMatrix& Bdot,
                                        double mass, double hbar) {
  check_operator(Q, "Q");
  check_operator(P, "P");
  check_operator(B, "B");
  check_operator(Bdot, "Bdot");
  require(Q.rows() == P.rows(), ErrorCode::dimension_mismatch, "Q and P differ in dimension");
  require(B.rows() == Bdot.rows(), ErrorCode::dimension_mismatch, "B and Bdot differ in dimension");
  require(mass > 0.0, ErrorCode::invalid_argument, "mass must be positive");
  const OperatorMatrix velocity = std::isfinite(mass) ? OperatorMatrix(P / mass)
                                                      : OperatorMatrix::Zero(P.rows(), P.cols());
  ExpandedHamiltonian h;
  h.h0 = kron(Q, B);
  h.h1 = kron(velocity, B) + kron(Q, Bdot);
  h.h2 = OperatorMatrix::Zero(h.h0.rows(), h.h0.cols());
  h.hbar = hbar;
  h.validate();
  return h;
}

ExpandedHamiltonian spin_generators(const OperatorMatrix& Jx, const OperatorMatrix& Jy,
                                    const OperatorMatrix& B, const OperatorMatrix& Bdot,
                                    const OperatorMatrix& Bddot, double omega, double hbar) {
  check_operator(Jx, "Jx");
  check_operator(Jy, "Jy");
  check_operator(B, "B");
  check_operator(Bdot, "Bdot");
  check_operator(Bddot, "Bddot");
  require(Jx.rows() == Jy.rows(), ErrorCode::dimension_mismatch, "Jx and Jy differ in dimension");
  require(B.rows() == Bdot.rows() && B.rows() == Bddot.rows(), ErrorCode::dimension_mismatch,
          "bath operators differ in dimension");
  require(std::isfinite(omega), ErrorCode::invalid_argument, "omega must be finite");
  ExpandedHamiltonian h;
  h.h0 = kron(Jx, B);
  h.h1 = kron(Jx, Bdot) - omega * kron(Jy, B);
  h.h2 = -omega * omega * kron(Jx, B) - 2.0 * omega * kron(Jy, Bdot) + kron(Jx, Bddot);
  h.hbar = hbar;
  h.validate();
  return h;
}

ExpansionError expansion_error(const ExpandedHamiltonian& h, const HamiltonianPath& h_of_t,
                               double t, int max_steps) {
  h.validate();
  require(std::isfinite(t) && t >= 0.0, ErrorCode::range, "time must be finite and >= 0");
  if (t == 0.0) return {};
  const OperatorMatrix phi = magnus_exponent(h, t);
  const OperatorMatrix approx =
      is_hermitian(phi) ? unitary_exp(phi, 1.0 / h.hbar) : expm((-I / h.hbar) * phi);

  // Midpoint products carry only even powers of the step, so one Richardson
  // step removes the delta^2 term; successive extrapolants then differ by
  // ~15x the error of the finer one.
  int n = 4;
  OperatorMatrix coarse = time_ordered_propagator(h_of_t, t, n, h.hbar);
  OperatorMatrix previous;
  bool have_previous = false;
  while (2 * n <= max_steps) {
    const OperatorMatrix fine = time_ordered_propagator(h_of_t, t, 2 * n, h.hbar);
    require(fine.rows() == approx.rows(), ErrorCode::dimension_mismatch,
            "h(t) and the expanded Hamiltonian differ in dimension");
    const OperatorMatrix extrapolated = (4.0 * fine - coarse) / 3.0;
    n *= 2;
    if (have_previous) {
      const double ref_err = spectral_norm(extrapolated - previous) / 15.0;
      const double distance = spectral_norm(extrapolated - approx);
      if (ref_err < 1e-3 * distance || ref_err < 1e-14) return {distance, ref_err, n};
    }
    previous = extrapolated;
    have_previous = true;
    coarse = fine;
  }
  std::ostringstream os;
  os << "reference propagator did not converge within " << max_steps << " steps";
  throw NumericalError(ErrorCode::reference_convergence, os.str());
}

}  // namespace decolab
