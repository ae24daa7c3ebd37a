// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
// runtime budgets are pinned below. Exit status is nonzero when a check
// fails that is not on the known-unattainable list.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "decolab/expansion.hpp"
#include "decolab/experiment.hpp"
#include "decolab/laws.hpp"
#include "decolab/numerics.hpp"
#include "decolab/oracle.hpp"
#include "decolab/spin.hpp"

using namespace decolab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pinned tolerances.
constexpr double kRatioLo = 12.8, kRatioHi = 19.2;         // 1
constexpr double kGaussianLawTol = 0.02;                   // 2
constexpr double kQuarticTol = 0.3;                        // 3
constexpr double kScalingTol = 0.05;                       // 4
constexpr double kMemoryTol = 0.03, kStaticGap = 0.05;     // 5
constexpr double kSpinTauTol = 0.05, kSpinQuarticTol = 0.4, kSpinMcTol = 0.05;  // 6
constexpr double kGoldenRuleTol = 1e-8;                    // 8
constexpr double kHoloTol = 1e-6;                          // 10

/// Checks that cannot pass as specified; see README ("Acceptance results").
const std::set<std::string> kKnownUnattainable = {"6b"};

struct Check {
  std::string id;
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// ---------------------------------------------------------------- 1

std::vector<Check> expansion_order() {
  double lo = kInf, hi = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    ExpandedHamiltonian h{random_hermitian(4, 100 + 3 * k), random_hermitian(4, 101 + 3 * k),
                          random_hermitian(4, 102 + 3 * k), 1.0};
    const double t = 0.05 / spectral_norm(h.h0);
    const HamiltonianPath path = [&h](double s) { return h.at(s); };
    const double ratio = expansion_error(h, path, t).distance /
                         expansion_error(h, path, t / 2).distance;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {{"1", lo >= kRatioLo && hi <= kRatioHi,
           "error(t)/error(t/2) over 10 triples in [" + fmt(lo) + ", " + fmt(hi) + "]"}};
}

// ---------------------------------------------------------------- 2

std::vector<Check> gaussian_law() {
  const PositionGrid grid(-2.0, 2.0, 16);
  const SystemSpec sys{GridParticle{grid, kInf, std::nullopt}, 1.0};
  BathModel bath = BathModel::equal_spins(16, 1.0);
  bath.dimension_cap = 1 << 16;
  const double q1 = 1.0, q2 = -1.0, d = q1 - q2;
  const auto times = linspace(0.0, 1.5, 151);
  const auto curve = evolve_norm(sys, bath, point_state(grid, q1), point_state(grid, q2), times);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double law = std::exp(-d * d * times[i] * times[i]);
    if (std::max(law, curve.values[i]) >= 0.1)
      worst = std::max(worst, std::abs(curve.values[i] - law));
  }
  return {{"2", worst <= kGaussianLawTol, "max |N_oracle - exp(-d^2 v t^2)| = " + fmt(worst) +
                                              " (M=16, d=2)"}};
}

// ---------------------------------------------------------------- 3

NormCurve momentum_curve(double dp, int bath_components, double t_max, int n_times,
                         double max_step) {
  // hbar = v = M = 1; packets at the origin with momenta +-dp/2.
  const double sigma = 0.056, width = std::sqrt(sigma);
  const double p = dp / 2.0;
  const double reach = p * t_max + 8.0 * width + 2.0;
  const double spread = 1.0 / (2.0 * width);
  const double cell = std::min(width / 4.0, std::numbers::pi / (p + 10.0 * spread));
  int n = 16;
  while (2.0 * reach / n > cell) n *= 2;
  const PositionGrid grid(-reach, reach, n);
  const SystemSpec sys{GridParticle{grid, 1.0, std::nullopt}, 1.0};
  const BathModel bath = BathModel::equal_spins(bath_components, 1.0);
  const auto b1 = grid_state(GaussianPacket(0.0, p, sigma), grid);
  const auto b2 = grid_state(GaussianPacket(0.0, -p, sigma), grid);
  EvolveOptions opt;
  opt.max_step = max_step;
  return evolve_norm(sys, bath, b1, b2, linspace(0.0, t_max, std::size_t(n_times)), opt);
}

std::vector<Check> quartic_law() {
  const auto curve = momentum_curve(40.0, 8, 0.45, 91, 1e-3);
  const auto fit = fit_decay_exponent(curve, 0.1, 0.9);
  return {{"3", std::abs(fit.n - 4.0) <= kQuarticTol,
           "fitted n = " + fmt(fit.n) + " over N in (0.1, 0.9), " + std::to_string(fit.points) +
               " points (dp=40, M=8)"}};
}

// ---------------------------------------------------------------- 4

double static_packet_tau(double d, double hbar, double sigma) {
  const double width = std::sqrt(sigma);
  const double reach = d / 2.0 + 8.0 * width + 0.5;
  int n = 16;
  while (2.0 * reach / n > width / 4.0) n *= 2;
  const PositionGrid grid(-reach, reach, n);
  const SystemSpec sys{GridParticle{grid, kInf, std::nullopt}, hbar};
  const BathModel bath = BathModel::equal_spins(8, 1.0);
  const auto b1 = grid_state(GaussianPacket(d / 2.0, 0.0, sigma, hbar), grid);
  const auto b2 = grid_state(GaussianPacket(-d / 2.0, 0.0, sigma, hbar), grid);
  const double tau = hbar / d;
  const auto curve = evolve_norm(sys, bath, b1, b2, linspace(0.0, 2.0 * tau, 201));
  return crossing_time(curve, std::exp(-1.0));
}

std::vector<Check> scaling_exponents() {
  std::vector<double> hbars{0.25, 0.5, 1.0, 2.0}, ds{1.0, 2.0, 4.0, 8.0}, dps{20, 40, 80, 160};
  std::vector<double> tau_h, tau_d, tau_p;
  for (double h : hbars) tau_h.push_back(static_packet_tau(1.0, h, 0.01));
  for (double d : ds) tau_d.push_back(static_packet_tau(d, 1.0, 0.01));
  for (double dp : dps) {
    const double law = std::pow(4.0 / (dp * dp), 0.25);
    const auto curve = momentum_curve(dp, 6, 1.6 * law, 161, 0.002 * law);
    tau_p.push_back(crossing_time(curve, std::exp(-1.0)));
  }
  const double mu = fit_scaling(hbars, tau_h, ScalingAxis::hbar).exponent;
  const double nu = fit_scaling(ds, tau_d, ScalingAxis::distance).exponent;
  const double nu_p = fit_scaling(dps, tau_p, ScalingAxis::distance).exponent;
  const bool pass = std::abs(mu - 1.0) <= kScalingTol && std::abs(nu - 1.0) <= kScalingTol &&
                    std::abs(nu_p - 0.5) <= kScalingTol;
  return {{"4", pass, "tau_Q: mu = " + fmt(mu) + ", nu = " + fmt(nu) + "; tau_P vs dp: " + fmt(nu_p)}};
}

// ---------------------------------------------------------------- 5

std::vector<Check> memory_law() {
  const PositionGrid grid(-2.0, 2.0, 16);
  const SystemSpec sys{GridParticle{grid, kInf, std::nullopt}, 1.0};
  BathModel bath;
  const int m = 12;
  const auto omegas = linspace(0.5, 2.0, m);
  for (double w : omegas) bath.components.push_back({ComponentKind::spin_half, std::sqrt(1.0 / m), w, 2, 0});
  const double q1 = 0.5, q2 = -0.5, d = q1 - q2;
  const auto times = linspace(0.0, 4.0, 201);
  const auto curve = evolve_norm(sys, bath, point_state(grid, q1), point_state(grid, q2), times);
  const auto corr = bath_correlation(bath);
  double worst = 0.0, gap = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double mem = memory_kernel_norm(times[i], d, 1.0, corr);
    if (std::max(mem, curve.values[i]) < 0.05) continue;
    worst = std::max(worst, std::abs(curve.values[i] - mem));
    gap = std::max(gap, std::abs(curve.values[i] - std::exp(-d * d * times[i] * times[i])));
  }
  return {{"5", worst <= kMemoryTol && gap > kStaticGap,
           "max |N_oracle - N_memory| = " + fmt(worst) + ", max |N_oracle - E^Q| = " + fmt(gap)}};
}

// ---------------------------------------------------------------- 6

std::vector<Check> spin_regimes() {
  const double j = 15.0, omega = 1.0;
  const BathModel bath = BathModel::equal_spins(12, 1.0);
  const BathMoments moments{1.0, 1.0, 0.0};
  const SystemSpec sys{SpinSystem{j, omega}, 1.0};
  std::vector<Check> out;

  {  // (a) d_x-dominant pair
    const cplx a = 1.0, b = -1.0;
    const double tau = spin_decoherence_times(j, a, b, omega, moments).tau_x.value();
    EvolveOptions opt;
    opt.max_step = 1e-4;
    const auto curve = evolve_norm(sys, bath, coherent_vector({j, a}), coherent_vector({j, b}),
                                   linspace(0.0, 2.5 * tau, 101), opt);
    const double fitted = fit_decay_time(curve, 2.0);
    const double rel = std::abs(fitted / tau - 1.0);
    out.push_back({"6a", rel <= kSpinTauTol,
                   "(a) Gaussian tau " + fmt(fitted) + " vs tau_x " + fmt(tau) + " (" + fmt(100 * rel, 2) + "%)"});
  }
  {  // (b) case ii: d_x = 0, d_y = 2 hbar j
    const cplx a = I, b = special_pair(a, PairCase::ii);
    const double tau = spin_decoherence_times(j, a, b, omega, moments).tau_y.value();
    const auto curve = evolve_norm(sys, bath, coherent_vector({j, a}), coherent_vector({j, b}),
                                   linspace(0.0, 2.0 * tau, 101));
    const auto fit = fit_decay_exponent(curve);
    out.push_back({"6b", std::abs(fit.n - 4.0) <= kSpinQuarticTol,
                   "(b) oracle n = " + fmt(fit.n) + " (tau_y " + fmt(tau) + ")"});
    // Informational: the leading-order Monte-Carlo norm of the same pair.
    NormCurve mc;
    SpinNormOptions o{SpinNormMode::montecarlo, 100000, 7, 8192};
    for (double t : linspace(0.0, 2.0 * tau, 81)) {
      mc.times.push_back(t);
      mc.values.push_back(spin_coherence_norm(t, j, a, b, omega, moments, 1.0, o).value);
    }
    out.back().detail += ", leading-order Monte-Carlo n = " + fmt(fit_decay_exponent(mc).n);
  }
  {  // (c) case i: d_x = d_y = 0, d_z != 0
    const cplx a = 0.5, b = special_pair(a, PairCase::i);
    const double tau = spin_decoherence_times(j, a, b, omega, moments).tau_z.value();
    SpinNormOptions o{SpinNormMode::montecarlo, 100000, 11, 8192};
    double worst = 0.0;
    for (double t : linspace(0.0, 3.0 * tau, 61)) {
      const double law = 1.0 / std::sqrt(1.0 + std::pow(t / tau, 6));
      if (law < 0.2) continue;
      const double mc = spin_coherence_norm(t, j, a, b, omega, moments, 1.0, o).value;
      worst = std::max(worst, std::abs(mc / law - 1.0));
    }
    out.push_back({"6c", worst <= kSpinMcTol,
                   "(c) Monte-Carlo vs (1+(t/tau_z)^6)^-1/2: max rel dev " + fmt(worst)});
  }
  return out;
}

// ---------------------------------------------------------------- 7

std::vector<Check> two_reservoir() {
  bool symmetric = true;
  double worst = 0.0;
  const auto ts = linspace(0.0, 3.0, 31);
  const double cases[][4] = {{1.0, 0.3, 1.0, 2.0}, {0.7, 2.5, 0.1, 3.0}, {3.0, 0.0, 1.0, 1.0}};
  for (const auto& c : cases)
    for (double t : ts) {
      const double a = two_reservoir_norm(t, c[0], c[1], c[2], c[3], 1.0);
      const double b = two_reservoir_norm(t, c[1], c[0], c[3], c[2], 1.0);
      symmetric = symmetric && a == b;
      const double tq = 1.0 / (std::abs(c[0]) * std::sqrt(c[2]));
      const double tp = c[1] == 0.0 ? kInf : 1.0 / (std::abs(c[1]) * std::sqrt(c[3]));
      const double expect = std::exp(-std::pow(t / tq, 2)) * std::exp(-std::pow(t / tp, 2));
      worst = std::max(worst, std::abs(a - expect));
    }
  return {{"7", symmetric && worst <= 1e-15,
           std::string("swap symmetry ") + (symmetric ? "exact" : "broken") +
               ", max deviation from Gaussian factors " + fmt(worst)}};
}

// ---------------------------------------------------------------- 8

std::vector<Check> golden_rule() {
  const double v = 1.0, gamma = 2.0;
  const auto corr = CorrelationFunction::exponential(v, gamma);
  const SystemParams sys{1.0, 0.0, 1.0};
  double lo = kInf, hi = 0.0, worst = 0.0;
  for (double d : logspace(0.1, 1.0, 11)) {
    const double tau = golden_rule_times(corr, sys, d).tau_dec.value();
    lo = std::min(lo, tau * d * d);
    hi = std::max(hi, tau * d * d);
    worst = std::max(worst, std::abs(tau / (gamma / (d * d * v)) - 1.0));
  }
  const double spread = hi / lo - 1.0;
  return {{"8", spread <= 1e-14 && worst <= kGoldenRuleTol,
           "tau d^2 relative spread " + fmt(spread) + ", max rel dev from gamma/(d^2 v) " + fmt(worst)}};
}

// ---------------------------------------------------------------- 9

std::vector<Check> clt() {
  ExperimentConfig c = ExperimentConfig::parse("[clt]\nvar_B = 1\ncomponents = 4,8,16,32\n");
  const auto table = run_experiment("clt", c);
  bool decreasing = true;
  std::string trail;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (i > 0) decreasing = decreasing && table.rows[i][1] < table.rows[i - 1][1];
    trail += (i ? ", " : "") + fmt(table.rows[i][1]);
  }
  return {{"9", decreasing, "sup distance for M = 4, 8, 16, 32: " + trail}};
}

// ---------------------------------------------------------------- 10

std::vector<Check> holomorphic() {
  const cplx a(0.3, 0.2);
  bool pass = true;
  std::string detail;
  for (double j : {0.5, 5.0, 25.0}) {
    const double r = verify_holomorphic_identities(j, a, 1e-5);
    const double r3 = verify_holomorphic_identities(j, a, 1e-3);
    const double r4 = verify_holomorphic_identities(j, a, 1e-4);
    const bool exact = r3 < 1e-12;  // degree <= 2 in alpha: differences are exact
    const double order = std::log10(r3 / r4);
    pass = pass && r < kHoloTol && (exact || (order > 1.8 && order < 2.2));
    detail += "j=" + fmt(j) + ": " + fmt(r, 2) + (exact ? " (exact)" : " order " + fmt(order, 3)) + "; ";
  }
  return {{"10", pass, detail}};
}

struct Criterion {
  std::string id, name;
  double budget_s;
  std::function<std::vector<Check>()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by id; all run by default.
  const std::set<std::string> only(argv + 1, argv + argc);
  const std::vector<Criterion> criteria = {
      {"1", "expansion order", 5, expansion_order},
      {"2", "gaussian law", 10, gaussian_law},
      {"3", "quartic law", 300, quartic_law},
      {"4", "scaling exponents", 600, scaling_exponents},
      {"5", "memory law", 120, memory_law},
      {"6", "spin regimes", 600, spin_regimes},
      {"7", "two-reservoir symmetry", 60, two_reservoir},
      {"8", "golden-rule comparison", 60, golden_rule},
      {"9", "clt convergence", 60, clt},
      {"10", "holomorphic identities", 60, holomorphic},
  };
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    std::vector<Check> checks;
    try {
      checks = c.run();
    } catch (const std::exception& e) {
      checks = {{c.id, false, std::string("error: ") + e.what()}};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    bool pass = in_time;
    std::string detail;
    for (const auto& k : checks) {
      pass = pass && k.pass;
      if (!k.pass && !kKnownUnattainable.count(k.id)) ++unexpected;
      detail += (detail.empty() ? "" : "; ") + k.detail;
      if (!k.pass && kKnownUnattainable.count(k.id)) detail += " [known unattainable]";
    }
    if (!in_time) ++unexpected;
    std::printf("%s %-3s %-24s %s (%.1f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", c.id.c_str(),
                c.name.c_str(), detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
