#include "decolab/fft.hpp"

#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "decolab/error.hpp"

namespace decolab {

namespace {
// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct FftPlan::Impl {
  fftw_plan plan = nullptr;
  ~Impl() {
    if (plan) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

FftPlan::FftPlan(int n, int howmany, int stride, int dist, FftDirection dir)
    : impl_(std::make_unique<Impl>()), n_(n) {
  require(n > 0 && howmany > 0 && stride > 0 && dist >= 0, ErrorCode::invalid_argument,
          "FftPlan: bad layout");
  std::vector<cplx> scratch(std::size_t(stride) * std::size_t(n - 1) +
                            std::size_t(dist) * std::size_t(howmany - 1) + 1);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int sign = dir == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  std::lock_guard lock(planner_mutex());
  impl_->plan = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, stride, dist, buf, nullptr,
                                   stride, dist, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!impl_->plan) throw NumericalError(ErrorCode::invalid_argument, "FFTW planning failed");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->plan, p, p);
}

std::vector<cplx> fft(std::span<const cplx> in, FftDirection dir) {
  std::vector<cplx> out(in.begin(), in.end());
  if (out.empty()) return out;
  FftPlan plan(int(out.size()), 1, 1, int(out.size()), dir);
  plan.execute(out.data());
  return out;
}

std::vector<double> fft_wavenumbers(int n, double dx) {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double base = 2.0 * std::numbers::pi / (double(n) * dx);
  for (int i = 0; i < n; ++i) k[std::size_t(i)] = base * double(i < (n + 1) / 2 ? i : i - n);
  return k;
}

}  // namespace decolab
