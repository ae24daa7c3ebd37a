#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace decolab {

using cplx = std::complex<double>;
using OperatorMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

/// Frobenius-norm test, relative to max(1, |a|).
bool is_hermitian(const OperatorMatrix& a, double tol = 1e-12);
bool is_finite(const OperatorMatrix& a);

/// Throws ValidationError unless `a` is square with finite entries.
void check_operator(const OperatorMatrix& a, const char* what);

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

/// Largest singular value.
double spectral_norm(const OperatorMatrix& a);

/// exp(-i h s) for Hermitian h, via the eigendecomposition of h.
OperatorMatrix unitary_exp(const OperatorMatrix& h, double s);

/// General matrix exponential (scaling and squaring with a Pade approximant).
OperatorMatrix expm(const OperatorMatrix& a);

/// Random Hermitian matrix with independent standard-normal real and
/// imaginary parts in the upper triangle; deterministic for a given seed.
OperatorMatrix random_hermitian(int dim, std::uint64_t seed);

}  // namespace decolab
