#pragma once

#include "decolab/linalg.hpp"

namespace decolab {

/// Minimum-uncertainty Gaussian packet centred at (q0, p0). `sigma` is the
/// position variance, so dq = sqrt(sigma) and dp = hbar / (2 sqrt(sigma)).
class GaussianPacket {
 public:
  GaussianPacket(double q0, double p0, double sigma, double hbar = 1.0);

  double q0() const { return q0_; }
  double p0() const { return p0_; }
  double sigma() const { return sigma_; }
  double hbar() const { return hbar_; }
  double width() const;

 private:
  double q0_, p0_, sigma_, hbar_;
};

/// c1 |packet1> + c2 |packet2> with |c1|^2 + |c2|^2 = 1.
class Superposition {
 public:
  Superposition(GaussianPacket packet1, GaussianPacket packet2, cplx c1, cplx c2);

  const GaussianPacket& packet1() const { return packet1_; }
  const GaussianPacket& packet2() const { return packet2_; }
  cplx c1() const { return c1_; }
  cplx c2() const { return c2_; }
  double dq() const { return packet1_.q0() - packet2_.q0(); }
  double dp() const { return packet1_.p0() - packet2_.p0(); }
  double sigma() const { return packet1_.sigma(); }
  double hbar() const { return packet1_.hbar(); }

 private:
  GaussianPacket packet1_, packet2_;
  cplx c1_, c2_;
};

/// Uniform periodic grid q_n = q_min + n * spacing, n = 0..n_points-1, with
/// spacing = (q_max - q_min) / n_points (q_max itself is the periodic image
/// of q_min).
class PositionGrid {
 public:
  PositionGrid(double q_min, double q_max, int n_points);

  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  int size() const { return n_; }
  double spacing() const { return (q_max_ - q_min_) / n_; }
  double point(int i) const { return q_min_ + i * spacing(); }
  Eigen::VectorXd points() const;
  /// Index of the grid point closest to q (clamped to the grid).
  int nearest(double q) const;

  bool operator==(const PositionGrid&) const = default;

 private:
  double q_min_, q_max_;
  int n_;
};

/// rho(q, q') sampled on grid x grid; values(i, j) = rho(q_i, q_j).
struct DensityBlock {
  PositionGrid grid;
  Eigen::MatrixXcd values;
};

cplx position_amplitude(const GaussianPacket& packet, double q);
cplx momentum_amplitude(const GaussianPacket& packet, double p);

/// Samples of position_amplitude on the grid (not rescaled).
StateVector sample_position(const GaussianPacket& packet, const PositionGrid& grid);

/// Throws NumericalError(resolution) unless the grid spacing is at most
/// sqrt(sigma)/4 and the box covers every packet centre +- 8 sqrt(sigma).
void check_resolution(const PositionGrid& grid, const GaussianPacket& a, const GaussianPacket& b);

/// rho^{ij}(q, q') = phi_i(q) phi_j(q')^*.
DensityBlock density_block(const GaussianPacket& packet_i, const GaussianPacket& packet_j,
                           const PositionGrid& grid);

/// Tr(a b^dagger) by trapezoidal quadrature on the shared grid.
double coherence_norm(const DensityBlock& a, const DensityBlock& b);

/// Tr(a) by trapezoidal quadrature along the diagonal.
cplx trace(const DensityBlock& a);

DensityBlock adjoint(const DensityBlock& a);

}  // namespace decolab
