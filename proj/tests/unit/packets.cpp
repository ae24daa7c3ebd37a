#include <cmath>
#include <numbers>

#include "decolab/error.hpp"
#include "decolab/packets.hpp"
#include "doctest.h"

using namespace decolab;

namespace {

constexpr double pi = std::numbers::pi;

// Plain O(N^2) Fourier sum in the unitary convention, independent of the
// FFT code path: phi~(p) = (2 pi hbar)^(-1/2) sum_n e^{-i p q_n / hbar} phi(q_n) dq.
cplx direct_transform(const GaussianPacket& g, const PositionGrid& grid, double p) {
  cplx acc = 0.0;
  for (int n = 0; n < grid.size(); ++n) {
    const double q = grid.point(n);
    acc += std::exp(-I * p * q / g.hbar()) * position_amplitude(g, q);
  }
  return acc * grid.spacing() / std::sqrt(2.0 * pi * g.hbar());
}

}  // namespace

TEST_SUITE("packets") {
  TEST_CASE("position amplitude examples") {
    const GaussianPacket g(0.0, 0.0, 1.0);
    CHECK(std::abs(position_amplitude(g, 0.0)) == doctest::Approx(std::pow(2 * pi, -0.25)).epsilon(1e-14));
    CHECK(std::abs(position_amplitude(g, 0.0)) == doctest::Approx(0.63161).epsilon(1e-5));

    const PositionGrid grid(-16.0, 16.0, 512);
    double norm = 0.0;
    for (int n = 0; n < grid.size(); ++n) norm += std::norm(position_amplitude(g, grid.point(n)));
    CHECK(std::abs(norm * grid.spacing() - 1.0) < 1e-8);

    const GaussianPacket moving(0.0, 2.0, 1.0);
    CHECK(std::abs(position_amplitude(moving, 1.0)) ==
          doctest::Approx(std::abs(position_amplitude(moving, -1.0))).epsilon(1e-15));
  }

  TEST_CASE("normalization across widths and hbar") {
    for (double sigma : {0.01, 0.3, 2.0})
      for (double hbar : {0.1, 1.0, 3.0}) {
        const GaussianPacket g(0.7, -1.3, sigma, hbar);
        const double w = std::sqrt(sigma);
        const PositionGrid grid(0.7 - 10 * w, 0.7 + 10 * w, 256);
        double norm = 0.0;
        for (int n = 0; n < grid.size(); ++n) norm += std::norm(position_amplitude(g, grid.point(n)));
        CHECK(std::abs(norm * grid.spacing() - 1.0) < 1e-6);
      }
  }

  TEST_CASE("momentum amplitude examples") {
    const GaussianPacket g(0.0, 0.0, 1.0);
    CHECK(std::abs(momentum_amplitude(g, 0.0)) == doctest::Approx(std::pow(2 * pi, 0.25) / std::sqrt(pi)).epsilon(1e-14));
    CHECK(std::abs(momentum_amplitude(g, 0.0)) == doctest::Approx(std::pow(2 / pi, 0.25)).epsilon(1e-14));

    const GaussianPacket shifted(3.0, 0.0, 1.0);
    for (double p : {-1.0, 0.0, 0.4, 2.0})
      CHECK(std::abs(momentum_amplitude(shifted, p)) ==
            doctest::Approx(std::abs(momentum_amplitude(g, p))).epsilon(1e-14));
  }

  TEST_CASE("fourier duality on a 512-point grid") {
    for (double hbar : {1.0, 0.5}) {
      const GaussianPacket g(0.4, 1.5, 0.8, hbar);
      const PositionGrid grid(-12.0, 12.0, 512);
      double sup = 0.0, ref = 0.0;
      const double dk = 2 * pi * hbar / (grid.q_max() - grid.q_min());
      for (int k = -256; k < 256; ++k) {
        const double p = k * dk;
        const cplx oracle = direct_transform(g, grid, p);
        sup = std::max(sup, std::abs(oracle - momentum_amplitude(g, p)));
        ref = std::max(ref, std::abs(oracle));
      }
      CHECK(sup / ref < 1e-6);
    }
  }

  TEST_CASE("density blocks") {
    const double sigma = 0.25, w = 0.5;
    const GaussianPacket a(-3.0, 0.0, sigma), b(3.0, 0.0, sigma);  // 12 sqrt(sigma) apart
    const PositionGrid grid(-3.0 - 8 * w, 3.0 + 8 * w, 128);
    const auto d11 = density_block(a, a, grid);
    CHECK((d11.values - d11.values.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(trace(d11) - 1.0) < 1e-8);

    const auto d12 = density_block(a, b, grid), d21 = density_block(b, a, grid);
    CHECK(adjoint(d21).values == d12.values);

    Eigen::Index r = 0, c = 0;
    d12.values.cwiseAbs().maxCoeff(&r, &c);
    CHECK(std::abs(grid.point(int(r)) - a.q0()) <= grid.spacing());
    CHECK(std::abs(grid.point(int(c)) - b.q0()) <= grid.spacing());
  }

  TEST_CASE("coherence norms at t = 0") {
    const double sigma = 0.25, w = 0.5;
    const GaussianPacket a(-3.0, 0.0, sigma), b(3.0, 0.0, sigma);
    const PositionGrid grid(-7.5, 7.5, 128);
    const auto d11 = density_block(a, a, grid), d12 = density_block(a, b, grid);
    CHECK(std::abs(coherence_norm(d11, d11) - 1.0) < 1e-6);
    CHECK(std::abs(coherence_norm(d12, d12) - 1.0) < 1e-6);

    // Tr(rho^{12} rho^{11 dagger}) = <phi1|phi1> <phi2|phi1>. With common
    // centres the overlap is exp(-sigma dp^2 / 2 hbar^2), a closed-form
    // Gaussian integral.
    const GaussianPacket u(0.0, 1.0, 1.0), v(0.0, -1.0, 1.0);
    const PositionGrid g2(-12.0, 12.0, 256);
    const double got = coherence_norm(density_block(u, v, g2), density_block(u, u, g2));
    CHECK(got == doctest::Approx(std::exp(-1.0 * 4.0 / 2.0)).epsilon(1e-8));
    (void)w;
  }

  TEST_CASE("grid refinement") {
    const double sigma = 0.04;
    const GaussianPacket a(-0.6, 1.0, sigma), b(0.6, -2.0, sigma);
    const GaussianPacket c(-0.5, 0.0, sigma);
    const PositionGrid coarse(-3.0, 3.0, 128), fine(-3.0, 3.0, 256);  // spacing < sqrt(sigma)/8
    CHECK(coarse.spacing() < std::sqrt(sigma) / 4);
    const double n1 = coherence_norm(density_block(a, b, coarse), density_block(c, b, coarse));
    const double n2 = coherence_norm(density_block(a, b, fine), density_block(c, b, fine));
    CHECK(std::abs(n1 - n2) < 1e-6);
  }

  TEST_CASE("resolution and mismatch errors") {
    const GaussianPacket a(0.0, 0.0, 0.01);
    CHECK_THROWS_AS(density_block(a, a, PositionGrid(-1.0, 1.0, 16)), NumericalError);
    CHECK_THROWS_AS(density_block(a, a, PositionGrid(-0.3, 0.3, 64)), NumericalError);
    const auto x = density_block(a, a, PositionGrid(-1.0, 1.0, 128));
    const auto y = density_block(a, a, PositionGrid(-1.0, 1.0, 256));
    CHECK_THROWS_AS(coherence_norm(x, y), ValidationError);
  }

  TEST_CASE("type invariants") {
    CHECK_THROWS_AS(GaussianPacket(0, 0, 0.0), ValidationError);
    CHECK_THROWS_AS(GaussianPacket(0, 0, 1.0, -1.0), ValidationError);
    CHECK_THROWS_AS(PositionGrid(1.0, 0.0, 16), ValidationError);
    CHECK_THROWS_AS(PositionGrid(0.0, 1.0, 8), ValidationError);
    CHECK_THROWS_AS(PositionGrid(0.0, 1.0, 48), ValidationError);
    const GaussianPacket g(0, 0, 1), h(1, 0, 1), k(1, 0, 2);
    CHECK_NOTHROW(Superposition(g, h, std::sqrt(0.5), I * std::sqrt(0.5)));
    CHECK_THROWS_AS(Superposition(g, h, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(Superposition(g, k, 1.0, 0.0), ValidationError);
    CHECK(g.width() == 1.0);
  }
}
