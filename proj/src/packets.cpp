#include "decolab/packets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "decolab/error.hpp"

namespace decolab {

using std::numbers::pi;

GaussianPacket::GaussianPacket(double q0, double p0, double sigma, double hbar)
    : q0_(q0), p0_(p0), sigma_(sigma), hbar_(hbar) {
  require(std::isfinite(q0) && std::isfinite(p0), ErrorCode::invalid_argument,
          "packet centre must be finite");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::invalid_argument,
          "packet variance sigma must be positive");
  require(hbar > 0.0 && std::isfinite(hbar), ErrorCode::invalid_argument,
          "hbar must be positive");
}

double GaussianPacket::width() const { return std::sqrt(sigma_); }

Superposition::Superposition(GaussianPacket packet1, GaussianPacket packet2, cplx c1, cplx c2)
    : packet1_(packet1), packet2_(packet2), c1_(c1), c2_(c2) {
  require(packet1.sigma() == packet2.sigma() && packet1.hbar() == packet2.hbar(),
          ErrorCode::invalid_argument, "superposed packets must share sigma and hbar");
  const double norm = std::norm(c1) + std::norm(c2);
  require(std::abs(norm - 1.0) <= 1e-12, ErrorCode::invalid_argument,
          "superposition amplitudes must satisfy |c1|^2 + |c2|^2 = 1");
}

PositionGrid::PositionGrid(double q_min, double q_max, int n_points)
    : q_min_(q_min), q_max_(q_max), n_(n_points) {
  require(std::isfinite(q_min) && std::isfinite(q_max) && q_max > q_min,
          ErrorCode::invalid_argument, "grid needs q_max > q_min");
  require(n_points >= 16 && (n_points & (n_points - 1)) == 0, ErrorCode::invalid_argument,
          "grid size must be a power of two and at least 16");
}

Eigen::VectorXd PositionGrid::points() const {
  Eigen::VectorXd q(n_);
  for (int i = 0; i < n_; ++i) q(i) = point(i);
  return q;
}

int PositionGrid::nearest(double q) const {
  const long i = std::lround((q - q_min_) / spacing());
  return int(std::clamp<long>(i, 0, n_ - 1));
}

cplx position_amplitude(const GaussianPacket& packet, double q) {
  const double x = q - packet.q0();
  const double norm = std::pow(2.0 * pi * packet.sigma(), -0.25);
  return norm * std::exp(I * (packet.p0() * x / packet.hbar())) *
         std::exp(-x * x / (4.0 * packet.sigma()));
}

cplx momentum_amplitude(const GaussianPacket& packet, double p) {
  const double h = packet.hbar();
  const double norm = std::pow(2.0 * pi * packet.sigma(), 0.25) / std::sqrt(pi * h);
  const double y = p - packet.p0();
  return norm * std::exp(-I * (p * packet.q0() / h)) *
         std::exp(-packet.sigma() * y * y / (h * h));
}

StateVector sample_position(const GaussianPacket& packet, const PositionGrid& grid) {
  StateVector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v(i) = position_amplitude(packet, grid.point(i));
  return v;
}

void check_resolution(const PositionGrid& grid, const GaussianPacket& a, const GaussianPacket& b) {
  const double w = std::min(a.width(), b.width());
  if (grid.spacing() > w / 4.0) {
    std::ostringstream os;
    os << "grid spacing " << grid.spacing() << " exceeds sqrt(sigma)/4 = " << w / 4.0;
    throw NumericalError(ErrorCode::resolution, os.str());
  }
  const double lo = std::min(a.q0() - 8.0 * a.width(), b.q0() - 8.0 * b.width());
  const double hi = std::max(a.q0() + 8.0 * a.width(), b.q0() + 8.0 * b.width());
  if (lo < grid.q_min() || hi > grid.q_max()) {
    std::ostringstream os;
    os << "grid [" << grid.q_min() << ", " << grid.q_max() << ") does not cover [" << lo
       << ", " << hi << "]";
    throw NumericalError(ErrorCode::resolution, os.str());
  }
}

DensityBlock density_block(const GaussianPacket& packet_i, const GaussianPacket& packet_j,
                           const PositionGrid& grid) {
  require(packet_i.sigma() == packet_j.sigma() && packet_i.hbar() == packet_j.hbar(),
          ErrorCode::invalid_argument, "density block packets must share sigma and hbar");
  check_resolution(grid, packet_i, packet_j);
  const StateVector a = sample_position(packet_i, grid);
  const StateVector b = sample_position(packet_j, grid);
  return {grid, a * b.adjoint()};
}

double coherence_norm(const DensityBlock& a, const DensityBlock& b) {
  if (!(a.grid == b.grid))
    throw ValidationError(ErrorCode::grid_mismatch, "coherence_norm: blocks live on different grids");
  const double dq = a.grid.spacing();
  // Tr(a b^dagger) = sum_{q,q'} a(q,q') conj(b(q,q'))
  return (a.values.array() * b.values.array().conjugate()).sum().real() * dq * dq;
}

cplx trace(const DensityBlock& a) { return a.values.diagonal().sum() * a.grid.spacing(); }

DensityBlock adjoint(const DensityBlock& a) { return {a.grid, a.values.adjoint()}; }

}  // namespace decolab
