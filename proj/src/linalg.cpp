#include "decolab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "decolab/error.hpp"
#include "decolab/random.hpp"

namespace decolab {

bool is_hermitian(const OperatorMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() < tol * std::max(1.0, a.norm());
}

bool is_finite(const OperatorMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

void check_operator(const OperatorMatrix& a, const char* what) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorCode::dimension_mismatch,
          std::string(what) + " must be a non-empty square matrix");
  require(is_finite(a), ErrorCode::invalid_argument,
          std::string(what) + " has non-finite entries");
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension_mismatch,
          "commutator of matrices with different shapes");
  return a * b - b * a;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  OperatorMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double spectral_norm(const OperatorMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<OperatorMatrix> svd(a);
  return svd.singularValues()(0);
}

OperatorMatrix unitary_exp(const OperatorMatrix& h, double s) {
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::exp(-I * (w(k) * s));
  const OperatorMatrix& v = es.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

OperatorMatrix expm(const OperatorMatrix& a) {
  check_operator(a, "expm argument");
  return a.exp();
}

OperatorMatrix random_hermitian(int dim, std::uint64_t seed) {
  CounterRng rng(seed);
  OperatorMatrix h(dim, dim);
  for (int i = 0; i < dim; ++i) {
    h(i, i) = rng.next_normal_pair().first;
    for (int j = i + 1; j < dim; ++j) {
      auto [re, im] = rng.next_normal_pair();
      h(i, j) = cplx(re, im);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

}  // namespace decolab
