#pragma once

#include <memory>
#include <span>
#include <vector>

#include "decolab/linalg.hpp"

namespace decolab {

enum class FftDirection { forward, backward };

/// Batched, strided 1-D complex transform (unnormalized, FFTW sign
/// convention: forward uses exp(-2 pi i k n / N)). Plans are created with
/// FFTW_ESTIMATE so results are reproducible bit-for-bit.
class FftPlan {
 public:
  FftPlan(int n, int howmany, int stride, int dist, FftDirection dir);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// In-place transform of the batch starting at `data`.
  void execute(cplx* data) const;
  int size() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
};

std::vector<cplx> fft(std::span<const cplx> in, FftDirection dir = FftDirection::forward);

/// Angular wavenumbers 2*pi*k/(n*dx) in FFT storage order.
std::vector<double> fft_wavenumbers(int n, double dx);

}  // namespace decolab
