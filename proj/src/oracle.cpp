#include "decolab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "decolab/error.hpp"
#include "decolab/fft.hpp"
#include "decolab/numerics.hpp"
#include "decolab/spin.hpp"

namespace decolab {

namespace {

using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A component in its own H_i eigenbasis: coupling b, energies, start index.
struct Local {
  Eigen::MatrixXcd b;
  Eigen::VectorXd energies;
  int initial = 0;
};

Local make_local(const BathComponent& c, double hbar) {
  Local l;
  l.initial = c.initial;
  if (c.kind == ComponentKind::spin_half) {
    l.b = Eigen::MatrixXcd::Zero(2, 2);
    l.b(0, 1) = l.b(1, 0) = c.g;
    l.energies = Eigen::Vector2d(0.5 * hbar * c.omega, -0.5 * hbar * c.omega);
  } else {
    const int n = c.levels;
    l.b = Eigen::MatrixXcd::Zero(n, n);
    l.energies.resize(n);
    for (int k = 0; k < n; ++k) {
      l.energies(k) = hbar * c.omega * k;
      if (k > 0) l.b(k - 1, k) = l.b(k, k - 1) = c.g * std::sqrt(double(k));
    }
  }
  return l;
}

/// (i/hbar)[H, b] for diagonal H.
Eigen::MatrixXcd local_derivative(const Eigen::MatrixXcd& b, const Eigen::VectorXd& e, double hbar) {
  Eigen::MatrixXcd out(b.rows(), b.cols());
  for (Eigen::Index r = 0; r < b.rows(); ++r)
    for (Eigen::Index c = 0; c < b.cols(); ++c) out(r, c) = (I / hbar) * (e(r) - e(c)) * b(r, c);
  return out;
}

void require_hbar(double hbar) {
  require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::invalid_argument, "hbar must be positive");
}

/// Strides of a product space, component 0 most significant.
std::vector<std::size_t> strides(const BathModel& bath) {
  const std::size_t m = bath.components.size();
  std::vector<std::size_t> s(m);
  std::size_t acc = 1;
  for (std::size_t i = m; i-- > 0;) {
    s[i] = acc;
    acc *= std::size_t(bath.components[i].dim());
  }
  return s;
}

std::size_t initial_index(const BathModel& bath) {
  const auto s = strides(bath);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < s.size(); ++i) idx += s[i] * std::size_t(bath.components[i].initial);
  return idx;
}

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void number(double x) { bytes(&x, sizeof x); }
  void integer(long long x) { bytes(&x, sizeof x); }
  void vector(const StateVector& v) { bytes(v.data(), std::size_t(v.size()) * sizeof(cplx)); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

/// Applies a d x d matrix to axis `stride`/`d` of a product-space vector.
void apply_local(cplx* row, std::size_t dim, std::size_t stride, const Eigen::MatrixXcd& u) {
  const std::size_t d = std::size_t(u.rows());
  const std::size_t block = d * stride;
  if (d == 2) {
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    for (std::size_t base = 0; base < dim; base += block)
      for (std::size_t r = 0; r < stride; ++r) {
        cplx& x0 = row[base + r];
        cplx& x1 = row[base + stride + r];
        const cplx a = x0, b = x1;
        x0 = u00 * a + u01 * b;
        x1 = u10 * a + u11 * b;
      }
    return;
  }
  std::vector<cplx> tmp(d);
  for (std::size_t base = 0; base < dim; base += block)
    for (std::size_t r = 0; r < stride; ++r) {
      for (std::size_t a = 0; a < d; ++a) {
        cplx acc{};
        for (std::size_t b = 0; b < d; ++b) acc += u(Eigen::Index(a), Eigen::Index(b)) * row[base + b * stride + r];
        tmp[a] = acc;
      }
      for (std::size_t a = 0; a < d; ++a) row[base + a * stride + r] = tmp[a];
    }
}

/// Split-step propagator for (system rows) x (bath columns).
class Engine {
 public:
  Engine(const SystemSpec& sys, const BathModel& bath, double max_step)
      : sys_(sys), bath_(bath), max_step_(max_step) {
    hbar_ = sys.hbar;
    rows_ = sys.dim();
    cols_ = bath.dimension();
    strides_ = strides(bath);
    for (const auto& c : bath.components) locals_.push_back(make_local(c, hbar_));
    coupling_.resize(rows_);
    potential_ = Eigen::VectorXd::Zero(rows_);

    if (const auto* p = std::get_if<GridParticle>(&sys.kind)) {
      for (int s = 0; s < rows_; ++s) coupling_[std::size_t(s)] = p->grid.point(s);
      if (p->harmonic_omega) {
        require(std::isfinite(p->mass), ErrorCode::invalid_argument,
                "a harmonic potential needs a finite mass");
        for (int s = 0; s < rows_; ++s) {
          const double q = p->grid.point(s);
          potential_(s) = 0.5 * p->mass * *p->harmonic_omega * *p->harmonic_omega * q * q;
        }
      }
      if (std::isfinite(p->mass)) {
        kinetic_ = true;
        mass_ = p->mass;
        wavenumbers_ = fft_wavenumbers(rows_, p->grid.spacing());
        forward_.emplace(rows_, int(cols_), int(cols_), 1, FftDirection::forward);
        backward_.emplace(rows_, int(cols_), int(cols_), 1, FftDirection::backward);
      }
    } else {
      const auto& sp = std::get<SpinSystem>(sys.kind);
      const auto m = spin_matrices(sp.j, hbar_);
      Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(m.jx);
      to_coupling_ = es.eigenvectors().adjoint();
      for (int s = 0; s < rows_; ++s) coupling_[std::size_t(s)] = es.eigenvalues()(s);
      if (sp.omega != 0.0) {
        spin_free_ = true;
        spin_omega_ = sp.omega;
        jz_ = m.jz.diagonal().real();
      }
    }
  }

  bool free_trivial() const { return !kinetic_ && !spin_free_; }

  /// Branch in the natural basis -> state matrix in the coupling basis.
  RowMajor initial_state(const StateVector& branch) const {
    RowMajor psi = RowMajor::Zero(rows_, Eigen::Index(cols_));
    const StateVector c = to_coupling_.size() ? StateVector(to_coupling_ * branch) : branch;
    const Eigen::Index b0 = Eigen::Index(initial_index(bath_));
    for (int s = 0; s < rows_; ++s) psi(s, b0) = c(s);
    return psi;
  }

  void advance(RowMajor& psi, double interval) {
    if (interval <= 0.0) return;
    if (free_trivial()) {
      prepare(interval);
      interact(psi);
      return;
    }
    const long n = std::max(1L, long(std::ceil(interval / max_step_ - 1e-9)));
    prepare(interval / double(n));
    for (long k = 0; k < n; ++k) {
      free_half(psi);
      interact(psi);
      free_half(psi);
    }
  }

 private:
  void prepare(double delta) {
    if (delta == delta_) return;
    delta_ = delta;
    const std::size_t m = locals_.size();
    step_.assign(std::size_t(rows_) * m, {});
    for (int s = 0; s < rows_; ++s)
      for (std::size_t i = 0; i < m; ++i) {
        const Local& l = locals_[i];
        Eigen::MatrixXcd h = coupling_[std::size_t(s)] * l.b;
        h.diagonal() += l.energies.cast<cplx>();
        step_[std::size_t(s) * m + i] = unitary_exp(h, delta / hbar_);
      }
    row_phase_.resize(rows_);
    for (int s = 0; s < rows_; ++s) row_phase_(s) = std::exp(-I * (potential_(s) * delta / hbar_));
    if (kinetic_) {
      half_phase_.resize(rows_);
      for (int k = 0; k < rows_; ++k) {
        const double kk = wavenumbers_[std::size_t(k)];
        half_phase_(k) = std::exp(-I * (hbar_ * kk * kk * delta / (4.0 * mass_))) / double(rows_);
      }
    }
    if (spin_free_) {
      Eigen::VectorXcd ph(rows_);
      for (int s = 0; s < rows_; ++s) ph(s) = std::exp(-I * (spin_omega_ * jz_(s) * delta / (2.0 * hbar_)));
      // to_coupling_ maps J_z-basis amplitudes to J_x-basis amplitudes.
      spin_half_ = to_coupling_ * ph.asDiagonal() * to_coupling_.adjoint();
    }
  }

  void interact(RowMajor& psi) const {
    const std::size_t m = locals_.size();
    for (int s = 0; s < rows_; ++s) {
      cplx* row = psi.row(s).data();
      bool any = false;
      for (std::size_t b = 0; b < cols_ && !any; ++b) any = row[b] != cplx{};
      if (!any) continue;
      for (std::size_t i = 0; i < m; ++i)
        apply_local(row, cols_, strides_[i], step_[std::size_t(s) * m + i]);
      if (row_phase_(s) != cplx(1.0, 0.0))
        for (std::size_t b = 0; b < cols_; ++b) row[b] *= row_phase_(s);
    }
  }

  void free_half(RowMajor& psi) const {
    if (kinetic_) {
      forward_->execute(psi.data());
      for (int k = 0; k < rows_; ++k) psi.row(k) *= half_phase_(k);
      backward_->execute(psi.data());
    } else if (spin_free_) {
      psi = spin_half_ * psi;
    }
  }

  SystemSpec sys_;
  BathModel bath_;
  double max_step_;
  double hbar_ = 1.0;
  int rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> strides_;
  std::vector<Local> locals_;
  std::vector<double> coupling_;
  Eigen::VectorXd potential_;

  bool kinetic_ = false;
  double mass_ = 1.0;
  std::vector<double> wavenumbers_;
  std::optional<FftPlan> forward_, backward_;

  bool spin_free_ = false;
  double spin_omega_ = 0.0;
  Eigen::VectorXd jz_;
  OperatorMatrix to_coupling_;

  double delta_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<Eigen::MatrixXcd> step_;
  Eigen::VectorXcd row_phase_, half_phase_;
  OperatorMatrix spin_half_;
};

double sandwich_norm(const RowMajor& a, const RowMajor& b) {
  if (a.rows() <= a.cols()) return (a * b.adjoint()).squaredNorm();
  // Tr(A B^+ B A^+) = sum_ij (A^+A)_ij conj((B^+B)_ij)
  const Eigen::MatrixXcd ga = a.adjoint() * a;
  const Eigen::MatrixXcd gb = b.adjoint() * b;
  return (ga.array() * gb.array().conjugate()).sum().real();
}

std::string fingerprint(const SystemSpec& sys, const BathModel& bath, const StateVector& b1,
                        const StateVector& b2, const std::vector<double>& times,
                        const EvolveOptions& options) {
  Fnv1a h;
  h.number(sys.hbar);
  if (const auto* p = std::get_if<GridParticle>(&sys.kind)) {
    h.integer(0);
    h.number(p->grid.q_min());
    h.number(p->grid.q_max());
    h.integer(p->grid.size());
    h.number(p->mass);
    h.number(p->harmonic_omega.value_or(std::numeric_limits<double>::quiet_NaN()));
  } else {
    const auto& s = std::get<SpinSystem>(sys.kind);
    h.integer(1);
    h.number(s.j);
    h.number(s.omega);
  }
  for (const auto& c : bath.components) {
    h.integer(int(c.kind));
    h.number(c.g);
    h.number(c.omega);
    h.integer(c.levels);
    h.integer(c.initial);
  }
  h.vector(b1);
  h.vector(b2);
  for (double t : times) h.number(t);
  h.number(options.max_step);
  return h.hex();
}

struct Window {
  std::vector<double> log_t, y;
};

Window fit_window(const NormCurve& curve, double lo, double hi) {
  require(curve.times.size() == curve.values.size(), ErrorCode::dimension_mismatch,
          "curve times and values differ in length");
  require(0.0 < lo && lo < hi && hi < 1.0, ErrorCode::invalid_argument,
          "fit window must satisfy 0 < lo < hi < 1");
  Window w;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i], n = curve.values[i];
    if (!(t > 0.0) || !(n > lo && n < hi)) continue;
    require(n < last, ErrorCode::range, "curve is not strictly decreasing over the fit window");
    last = n;
    w.log_t.push_back(std::log(t));
    w.y.push_back(std::log(-std::log(n)));
  }
  require(w.y.size() >= 8, ErrorCode::insufficient_data,
          "fewer than 8 curve points inside the fit window");
  return w;
}

}  // namespace

std::size_t BathModel::dimension() const {
  std::size_t d = 1;
  for (const auto& c : components) d *= std::size_t(std::max(1, c.dim()));
  return d;
}

void BathModel::validate(double hbar) const {
  require(!components.empty(), ErrorCode::invalid_argument, "bath needs at least one component");
  std::size_t d = 1;
  for (const auto& c : components) {
    require(std::isfinite(c.g) && std::isfinite(c.omega), ErrorCode::invalid_argument,
            "bath component coupling and frequency must be finite");
    require(c.kind == ComponentKind::spin_half || c.levels >= 2, ErrorCode::invalid_argument,
            "oscillator components need at least 2 levels");
    require(c.initial >= 0 && c.initial < c.dim(), ErrorCode::invalid_argument,
            "bath component initial level out of range");
    const std::size_t cd = std::size_t(c.dim());
    if (d * cd > dimension_cap) {
      std::ostringstream os;
      os << "bath dimension exceeds the cap of " << dimension_cap;
      throw ValidationError(ErrorCode::dimension_cap, os.str());
    }
    d *= cd;
    const Local l = make_local(c, hbar);
    require(std::abs(l.b(c.initial, c.initial)) <= 1e-12, ErrorCode::invalid_argument,
            "bath component initial state must have a vanishing coupling mean");
  }
}

BathModel BathModel::equal_spins(int m, double var_B, double omega) {
  require(m >= 1 && var_B >= 0.0, ErrorCode::invalid_argument,
          "equal_spins needs m >= 1 and var_B >= 0");
  BathModel b;
  const double g = std::sqrt(var_B / m);
  for (int i = 0; i < m; ++i) b.components.push_back({ComponentKind::spin_half, g, omega, 2, 0});
  return b;
}

BathMoments bath_moments(const BathModel& bath, double hbar) {
  require_hbar(hbar);
  bath.validate(hbar);
  BathMoments out;
  double var_bd = 0.0;
  for (const auto& c : bath.components) {
    const Local l = make_local(c, hbar);
    const Eigen::MatrixXcd bd = local_derivative(l.b, l.energies, hbar);
    const int n0 = l.initial;
    out.var_B += (l.b * l.b)(n0, n0).real();
    var_bd += (bd * bd)(n0, n0).real();
    out.kappa += ((l.b * bd - bd * l.b)(n0, n0) / (I * hbar)).real();
  }
  out.var_Bdot = var_bd;
  return out;
}

CorrelationFunction bath_correlation(const BathModel& bath, double hbar) {
  require_hbar(hbar);
  bath.validate(hbar);
  // C(s) = <B(s) B> = sum_k w_k exp(i nu_k s).
  std::vector<double> w, nu;
  for (const auto& c : bath.components) {
    const Local l = make_local(c, hbar);
    const int n0 = l.initial;
    for (Eigen::Index b = 0; b < l.b.rows(); ++b) {
      const double weight = std::norm(l.b(n0, b));
      if (weight == 0.0) continue;
      w.push_back(weight);
      nu.push_back((l.energies(n0) - l.energies(b)) / hbar);
    }
  }
  CorrelationFunction corr;
  corr.sym = [w, nu](double s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc += 2.0 * w[k] * std::cos(nu[k] * s);
    return acc;
  };
  corr.resp = [w, nu, hbar](double s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) acc -= 2.0 / hbar * w[k] * std::sin(nu[k] * s);
    return acc;
  };
  corr.tail_cutoff = std::numeric_limits<double>::infinity();
  return corr;
}

BathOperators build_bath_operators(const BathModel& bath, double hbar) {
  require_hbar(hbar);
  bath.validate(hbar);
  const std::size_t dim = bath.dimension();
  const auto st = strides(bath);
  const Eigen::Index n = Eigen::Index(dim);
  BathOperators out;
  out.B = OperatorMatrix::Zero(n, n);
  out.H_res = OperatorMatrix::Zero(n, n);
  for (std::size_t i = 0; i < bath.components.size(); ++i) {
    const Local l = make_local(bath.components[i], hbar);
    const std::size_t d = std::size_t(l.b.rows());
    for (std::size_t x = 0; x < dim; ++x) {
      const std::size_t digit = (x / st[i]) % d;
      const std::size_t base = x - digit * st[i];
      out.H_res(Eigen::Index(x), Eigen::Index(x)) += l.energies(Eigen::Index(digit));
      for (std::size_t a = 0; a < d; ++a)
        out.B(Eigen::Index(base + a * st[i]), Eigen::Index(x)) += l.b(Eigen::Index(a), Eigen::Index(digit));
    }
  }
  out.Bdot = (I / hbar) * commutator(out.H_res, out.B);
  out.Bddot = (I / hbar) * commutator(out.H_res, out.Bdot);
  out.initial = StateVector::Zero(n);
  out.initial(Eigen::Index(initial_index(bath))) = 1.0;

  const StateVector& psi = out.initial;
  const StateVector bpsi = out.B * psi;
  const StateVector bdpsi = out.Bdot * psi;
  out.moments.var_B = bpsi.squaredNorm();
  out.moments.var_Bdot = bdpsi.squaredNorm();
  // <[B, Bdot]> / (i hbar) = 2 Im<B Bdot> / hbar
  out.moments.kappa = 2.0 * bpsi.dot(bdpsi).imag() / hbar;
  out.corr = bath_correlation(bath, hbar);
  return out;
}

cplx bath_characteristic(const BathModel& bath, double lambda) {
  bath.validate();
  cplx acc = 1.0;
  for (const auto& c : bath.components) {
    if (c.kind == ComponentKind::spin_half) {
      acc *= std::cos(lambda * c.g);
      continue;
    }
    const Local l = make_local(c, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l.b);
    cplx local{};
    for (Eigen::Index k = 0; k < l.b.rows(); ++k)
      local += std::norm(es.eigenvectors()(l.initial, k)) * std::exp(I * (lambda * es.eigenvalues()(k)));
    acc *= local;
  }
  return acc;
}

double static_bath_norm(double d, const BathModel& bath, double t, double hbar) {
  require_hbar(hbar);
  require(std::isfinite(t) && t >= 0.0, ErrorCode::range, "time must be finite and >= 0");
  bath.validate(hbar);
  double n = 1.0;
  for (const auto& c : bath.components) {
    if (c.kind != ComponentKind::spin_half)
      throw ValidationError(ErrorCode::unsupported, "static_bath_norm supports spin-half components only");
    const double x = std::cos(d * c.g * t / hbar);
    n *= x * x;
  }
  return n;
}

int SystemSpec::dim() const {
  if (const auto* p = std::get_if<GridParticle>(&kind)) return p->grid.size();
  const auto& s = std::get<SpinSystem>(kind);
  check_spin(s.j);
  return int(std::lround(2.0 * s.j)) + 1;
}

StateVector grid_state(const GaussianPacket& packet, const PositionGrid& grid) {
  check_resolution(grid, packet, packet);
  return sample_position(packet, grid) * std::sqrt(grid.spacing());
}

StateVector point_state(const PositionGrid& grid, double q) {
  require(q >= grid.q_min() && q < grid.q_max(), ErrorCode::range, "point lies outside the grid");
  StateVector v = StateVector::Zero(grid.size());
  v(grid.nearest(q)) = 1.0;
  return v;
}

NormCurve evolve_norm(const SystemSpec& sys, const BathModel& bath, const StateVector& branch1,
                      const StateVector& branch2, const std::vector<double>& times,
                      const EvolveOptions& options) {
  require_hbar(sys.hbar);
  bath.validate(sys.hbar);
  if (const auto* p = std::get_if<GridParticle>(&sys.kind))
    require(p->mass > 0.0, ErrorCode::invalid_argument, "mass must be positive");
  else
    require(std::isfinite(std::get<SpinSystem>(sys.kind).omega), ErrorCode::invalid_argument,
            "spin omega must be finite");
  const int rows = sys.dim();
  require(branch1.size() == rows && branch2.size() == rows, ErrorCode::dimension_mismatch,
          "branch states do not match the system dimension");
  require(!times.empty(), ErrorCode::invalid_argument, "evolve_norm needs at least one time");
  for (std::size_t i = 0; i < times.size(); ++i)
    require(std::isfinite(times[i]) && times[i] >= 0.0 && (i == 0 || times[i] > times[i - 1]),
            ErrorCode::range, "times must be finite, >= 0 and strictly ascending");
  require(options.max_step > 0.0, ErrorCode::invalid_argument, "max_step must be positive");
  const std::size_t cols = bath.dimension();
  if (std::size_t(rows) > options.combined_cap / cols) {
    std::ostringstream os;
    os << "combined dimension " << rows << " x " << cols << " exceeds the cap of "
       << options.combined_cap;
    throw ValidationError(ErrorCode::dimension_cap, os.str());
  }

  Engine engine(sys, bath, options.max_step);
  RowMajor a = engine.initial_state(branch1);
  RowMajor b = engine.initial_state(branch2);
  const double na = a.norm(), nb = b.norm();

  NormCurve curve;
  curve.fingerprint = fingerprint(sys, bath, branch1, branch2, times, options);
  double now = 0.0;
  for (double t : times) {
    engine.advance(a, t - now);
    engine.advance(b, t - now);
    now = t;
    const double drift = std::max(std::abs(a.norm() - na), std::abs(b.norm() - nb));
    if (drift > 1e-8) {
      std::ostringstream os;
      os << "state norm drifted by " << drift << " at t = " << t;
      throw NumericalError(ErrorCode::step_size, os.str());
    }
    curve.times.push_back(t);
    curve.values.push_back(sandwich_norm(a, b));
  }
  return curve;
}

DecayFit fit_decay_exponent(const NormCurve& curve, double lo, double hi) {
  const Window w = fit_window(curve, lo, hi);
  const LineFit f = fit_line(w.log_t, w.y);
  require(f.slope > 0.0, ErrorCode::range, "fitted decay exponent is not positive");
  return {f.slope, std::exp(-f.intercept / f.slope), f.slope_stderr, f.points};
}

double fit_decay_time(const NormCurve& curve, double n, double lo, double hi) {
  require(n > 0.0, ErrorCode::invalid_argument, "decay exponent must be positive");
  const Window w = fit_window(curve, lo, hi);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.y.size(); ++i) acc += w.log_t[i] - w.y[i] / n;
  return std::exp(acc / double(w.y.size()));
}

double crossing_time(const NormCurve& curve, double level) {
  require(curve.times.size() == curve.values.size() && !curve.times.empty(),
          ErrorCode::dimension_mismatch, "curve is empty or ragged");
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (curve.values[i] > level) continue;
    if (i == 0) return curve.times[0];
    const double t0 = curve.times[i - 1], t1 = curve.times[i];
    const double v0 = curve.values[i - 1], v1 = curve.values[i];
    return t0 + (t1 - t0) * (v0 - level) / (v0 - v1);
  }
  throw ValidationError(ErrorCode::range, "curve never reaches the requested level");
}

}  // namespace decolab
