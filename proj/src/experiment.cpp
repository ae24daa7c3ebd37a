#include "decolab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "decolab/error.hpp"
#include "decolab/expansion.hpp"
#include "decolab/laws.hpp"
#include "decolab/numerics.hpp"
#include "decolab/oracle.hpp"
#include "decolab/spin.hpp"

#ifndef DECOLAB_VERSION
#define DECOLAB_VERSION "0.0.0"
#endif

namespace decolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ValidationError(ErrorCode::invalid_argument, key + ": not a number: '" + s + "'");
  return x;
}

long long parse_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long x = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (s.empty() || ec != std::errc() || ptr != end)
    throw ValidationError(ErrorCode::invalid_argument, key + ": not an integer: '" + s + "'");
  return x;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- config pieces

std::vector<double> time_grid(const ExperimentConfig& c) {
  const double t0 = c.number("time.t_min", 0.0);
  const double t1 = c.number("time.t_max");
  const long long n = c.integer("time.points", 101);
  const std::string spacing = c.text("time.spacing", "linear");
  require(n >= 2, ErrorCode::range, "time.points must be >= 2");
  require(std::isfinite(t0) && std::isfinite(t1) && t0 >= 0.0 && t1 > t0, ErrorCode::range,
          "time grid needs 0 <= t_min < t_max");
  if (spacing == "linear") return linspace(t0, t1, std::size_t(n));
  require(spacing == "log", ErrorCode::invalid_argument, "time.spacing must be linear or log");
  require(t0 > 0.0, ErrorCode::range, "a log time grid needs t_min > 0");
  return logspace(t0, t1, std::size_t(n));
}

struct Sweep {
  std::string axis;
  std::vector<double> values;
  bool log = true;
};

Sweep sweep_axis(const ExperimentConfig& c, const std::vector<std::string>& allowed) {
  Sweep s;
  s.axis = c.text("sweep.axis");
  require(std::find(allowed.begin(), allowed.end(), s.axis) != allowed.end(),
          ErrorCode::invalid_argument, "sweep.axis '" + s.axis + "' is not supported here");
  const double from = c.number("sweep.from"), to = c.number("sweep.to");
  const long long n = c.integer("sweep.points");
  const std::string spacing = c.text("sweep.spacing", "log");
  require(n >= 1 && std::isfinite(from) && std::isfinite(to) && from <= to, ErrorCode::range,
          "empty sweep range: need points >= 1 and from <= to");
  require(n == 1 || from < to, ErrorCode::range, "empty sweep range: from == to with several points");
  require(spacing == "log" || spacing == "linear", ErrorCode::invalid_argument,
          "sweep.spacing must be log or linear");
  s.log = spacing == "log";
  if (s.log) {
    require(from > 0.0, ErrorCode::range, "a log sweep needs positive bounds");
    s.values = logspace(from, to, std::size_t(n));
  } else {
    s.values = linspace(from, to, std::size_t(n));
  }
  return s;
}

SystemParams system_params(const ExperimentConfig& c) {
  SystemParams s{c.number("system.mass", 1.0), c.number("system.omega", 0.0),
                 c.number("system.hbar", 1.0)};
  s.validate();
  return s;
}

BathMoments bath_moments_config(const ExperimentConfig& c) {
  BathMoments b;
  b.var_B = c.number("bath.var_B");
  if (c.has("bath.var_Bdot")) b.var_Bdot = c.number("bath.var_Bdot");
  b.kappa = c.number("bath.kappa", 0.0);
  b.validate();
  return b;
}

std::optional<CorrelationFunction> correlation_config(const ExperimentConfig& c, double var_B) {
  if (!c.has("correlation.kind")) return std::nullopt;
  const std::string kind = c.text("correlation.kind");
  std::optional<double> cutoff;
  if (c.has("correlation.tail_cutoff")) cutoff = c.number("correlation.tail_cutoff");
  if (kind == "exponential")
    return CorrelationFunction::exponential(var_B, c.number("correlation.gamma"), cutoff);
  if (kind == "gaussian")
    return CorrelationFunction::gaussian(var_B, c.number("correlation.tau"), cutoff);
  if (kind == "constant")
    return CorrelationFunction::constant(var_B, c.number("correlation.tail_cutoff"));
  throw ValidationError(ErrorCode::invalid_argument,
                        "correlation.kind must be exponential, gaussian or constant");
}

BathModel bath_model_config(const ExperimentConfig& c) {
  const std::string kind = c.text("bath_model.kind", "spin_half");
  const long long m = c.integer("bath_model.components");
  const double var = c.number("bath_model.var_B");
  const double w0 = c.number("bath_model.omega_min", 0.0);
  const double w1 = c.number("bath_model.omega_max", w0);
  const long long cap = c.integer("bath_model.cap", 4096);
  require(m >= 1 && m <= 64, ErrorCode::range, "bath_model.components must lie in [1, 64]");
  require(var > 0.0, ErrorCode::invalid_argument, "bath_model.var_B must be positive");
  require(cap >= 2, ErrorCode::invalid_argument, "bath_model.cap must be >= 2");
  BathModel b;
  b.dimension_cap = std::size_t(cap);
  const auto omegas = linspace(w0, w1, std::size_t(m));
  if (kind == "spin_half") {
    const double g = std::sqrt(var / double(m));
    for (long long i = 0; i < m; ++i)
      b.components.push_back({ComponentKind::spin_half, g, omegas[std::size_t(i)], 2, 0});
  } else if (kind == "oscillator") {
    // <(a + a^+)^2> = 1 in the ground state, so g^2 = var_B / M as well.
    const long long levels = c.integer("bath_model.levels", 4);
    const double g = std::sqrt(var / double(m));
    for (long long i = 0; i < m; ++i)
      b.components.push_back({ComponentKind::oscillator, g, omegas[std::size_t(i)], int(levels), 0});
  } else {
    throw ValidationError(ErrorCode::invalid_argument, "bath_model.kind must be spin_half or oscillator");
  }
  return b;
}

cplx complex_pair(const ExperimentConfig& c, const std::string& prefix) {
  return {c.number(prefix + "_re", 0.0), c.number(prefix + "_im", 0.0)};
}

void add_fit(ResultTable& table, const std::string& name, std::span<const double> x,
             std::span<const double> tau, ScalingAxis axis) {
  if (x.size() < 4) return;
  for (double t : tau)
    if (!std::isfinite(t) || t <= 0.0) return;
  const auto f = fit_scaling(x, tau, axis);
  table.summary.emplace_back(name, f.exponent);
  table.summary.emplace_back(name + "_stderr", f.stderr_exponent);
}

ScalingAxis scaling_axis(const std::string& axis) {
  if (axis == "hbar") return ScalingAxis::hbar;
  if (axis == "j") return ScalingAxis::j;
  return ScalingAxis::distance;
}

// ---------------------------------------------------------------- experiments

ResultTable run_times(const ExperimentConfig& c) {
  const auto sys = system_params(c);
  const auto bath = bath_moments_config(c);
  const double dq = c.number("packets.dq"), dp = c.number("packets.dp", 0.0);
  const auto t = decoherence_times(dq, dp, sys, bath);
  ResultTable table;
  table.columns = {"dq", "dp", "mass", "hbar", "var_B", "tau_q", "tau_qp", "tau_p"};
  table.rows.push_back({dq, dp, sys.mass, sys.hbar, bath.var_B, t.tau_q.or_infinity(),
                        t.tau_qp.or_infinity(), t.tau_p.or_infinity()});
  return table;
}

ResultTable run_sweep(const ExperimentConfig& c, const RunSettings& settings) {
  const auto base = system_params(c);
  const auto bath0 = bath_moments_config(c);
  const double dq0 = c.number("packets.dq"), dp0 = c.number("packets.dp", 0.0);
  const auto sweep = sweep_axis(c, {"hbar", "dq", "dp", "mass", "var_B"});
  const bool gr = c.has("correlation.kind");
  correlation_config(c, bath0.var_B);  // validate once up front

  ResultTable table;
  table.columns = {sweep.axis, "tau_q", "tau_qp", "tau_p"};
  if (gr) table.columns.push_back("tau_dec_gr");
  table.rows = parallel_rows(sweep.values.size(), settings.threads, [&](std::size_t i) {
    SystemParams sys = base;
    BathMoments bath = bath0;
    double dq = dq0, dp = dp0;
    const double x = sweep.values[i];
    if (sweep.axis == "hbar") sys.hbar = x;
    if (sweep.axis == "dq") dq = x;
    if (sweep.axis == "dp") dp = x;
    if (sweep.axis == "mass") sys.mass = x;
    if (sweep.axis == "var_B") bath.var_B = x;
    const auto t = decoherence_times(dq, dp, sys, bath);
    std::vector<double> row{x, t.tau_q.or_infinity(), t.tau_qp.or_infinity(), t.tau_p.or_infinity()};
    if (gr) {
      const auto corr = correlation_config(c, bath.var_B);
      row.push_back(golden_rule_times(*corr, sys, dq).tau_dec.or_infinity());
    }
    return row;
  });

  if (sweep.axis == "hbar" || sweep.axis == "dq" || sweep.axis == "dp") {
    const auto axis = scaling_axis(sweep.axis == "hbar" ? "hbar" : "distance");
    const std::string sym = sweep.axis == "hbar" ? "mu" : "nu";
    std::vector<double> x;
    for (const auto& r : table.rows) x.push_back(r[0]);
    for (std::size_t col = 1; col < table.columns.size(); ++col) {
      std::vector<double> tau;
      for (const auto& r : table.rows) tau.push_back(r[col]);
      add_fit(table, sym + "_" + table.columns[col], x, tau, axis);
    }
  }
  return table;
}

ResultTable run_norm(const ExperimentConfig& c) {
  const auto sys = system_params(c);
  const auto bath = bath_moments_config(c);
  const double sigma = c.number("packets.sigma");
  const GaussianPacket p1(c.number("packets.q1"), c.number("packets.p1", 0.0), sigma, sys.hbar);
  const GaussianPacket p2(c.number("packets.q2"), c.number("packets.p2", 0.0), sigma, sys.hbar);
  const Superposition sup(p1, p2, std::sqrt(0.5), std::sqrt(0.5));
  const auto corr = correlation_config(c, bath.var_B);
  if (corr) corr->check_consistent(bath);
  ResultTable table;
  table.columns = {"t", "prefactor", "e_q", "e_qp", "e_p", "norm_short_time"};
  if (corr) table.columns.push_back("norm_memory");
  for (double t : time_grid(c)) {
    const auto f = short_time_factors(t, sup, sys, bath);
    std::vector<double> row{t, f.prefactor, f.e_q, f.e_qp, f.e_p, f.product()};
    if (corr) row.push_back(memory_kernel_norm(t, sup.dq(), sys.hbar, *corr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct OracleSetup {
  SystemSpec sys;
  BathModel bath;
  StateVector branch1, branch2;
  double separation = 0.0;  // d in the coupling agent
  bool spin = false;
  double j = 0.5, omega = 0.0;
  cplx alpha, beta;
  EvolveOptions options;
};

OracleSetup oracle_setup(const ExperimentConfig& c, std::optional<std::pair<std::string, double>> over) {
  OracleSetup s;
  double hbar = c.number("system.hbar", 1.0);
  if (over && over->first == "hbar") hbar = over->second;
  s.sys.hbar = hbar;
  s.bath = bath_model_config(c);
  s.options.max_step = c.number("oracle.max_step", 1e-3);
  const std::string kind = c.text("oracle.system", "particle");
  if (kind == "particle") {
    const PositionGrid grid(c.number("oracle.q_min"), c.number("oracle.q_max"),
                            int(c.integer("oracle.n_points")));
    GridParticle p{grid, c.number("oracle.mass", kInf), std::nullopt};
    if (c.has("oracle.harmonic_omega")) p.harmonic_omega = c.number("oracle.harmonic_omega");
    s.sys.kind = p;
    double q1 = c.number("oracle.q1"), q2 = c.number("oracle.q2");
    if (over && over->first == "distance") {
      const double mid = 0.5 * (q1 + q2);
      q1 = mid + 0.5 * over->second;
      q2 = mid - 0.5 * over->second;
    }
    s.separation = q1 - q2;
    const std::string branches = c.text("oracle.branches", "point");
    if (branches == "point") {
      s.branch1 = point_state(grid, q1);
      s.branch2 = point_state(grid, q2);
      s.separation = grid.point(grid.nearest(q1)) - grid.point(grid.nearest(q2));
    } else if (branches == "packet") {
      const double sigma = c.number("oracle.sigma");
      s.branch1 = grid_state(GaussianPacket(q1, c.number("oracle.p1", 0.0), sigma, hbar), grid);
      s.branch2 = grid_state(GaussianPacket(q2, c.number("oracle.p2", 0.0), sigma, hbar), grid);
    } else {
      throw ValidationError(ErrorCode::invalid_argument, "oracle.branches must be point or packet");
    }
  } else if (kind == "spin") {
    s.spin = true;
    s.j = c.number("oracle.j");
    s.omega = c.number("oracle.omega", 0.0);
    s.alpha = complex_pair(c, "oracle.alpha");
    s.beta = complex_pair(c, "oracle.beta");
    s.sys.kind = SpinSystem{s.j, s.omega};
    s.branch1 = coherent_vector(SpinCoherent(s.j, s.alpha, hbar));
    s.branch2 = coherent_vector(SpinCoherent(s.j, s.beta, hbar));
    s.separation = separations(s.j, s.alpha, s.beta, hbar).d_x;
  } else {
    throw ValidationError(ErrorCode::invalid_argument, "oracle.system must be particle or spin");
  }
  return s;
}

ResultTable run_oracle_compare(const ExperimentConfig& c, const RunSettings& settings) {
  const auto times = time_grid(c);
  ResultTable table;

  if (c.has("sweep.axis")) {
    const auto sweep = sweep_axis(c, {"hbar", "distance"});
    table.columns = {sweep.axis, "tau_oracle", "tau_law"};
    table.rows = parallel_rows(sweep.values.size(), settings.threads, [&](std::size_t i) {
      const auto s = oracle_setup(c, std::make_pair(sweep.axis, sweep.values[i]));
      const auto curve = evolve_norm(s.sys, s.bath, s.branch1, s.branch2, times, s.options);
      const auto m = bath_moments(s.bath, s.sys.hbar);
      const double law = s.sys.hbar / (std::abs(s.separation) * std::sqrt(m.var_B));
      return std::vector<double>{sweep.values[i], crossing_time(curve, std::exp(-1.0)), law};
    });
    std::vector<double> x, tau;
    for (const auto& r : table.rows) {
      x.push_back(r[0]);
      tau.push_back(r[1]);
    }
    add_fit(table, sweep.axis == "hbar" ? "mu_oracle" : "nu_oracle", x, tau, scaling_axis(sweep.axis));
    return table;
  }

  const auto s = oracle_setup(c, std::nullopt);
  const auto curve = evolve_norm(s.sys, s.bath, s.branch1, s.branch2, times, s.options);
  const auto ops_moments = bath_moments(s.bath, s.sys.hbar);
  const auto corr = bath_correlation(s.bath, s.sys.hbar);
  const bool spins = std::all_of(s.bath.components.begin(), s.bath.components.end(),
                                 [](const BathComponent& b) { return b.kind == ComponentKind::spin_half; });
  table.columns = {"t", "n_oracle", "n_static_law", "n_memory_law"};
  if (spins) table.columns.push_back("n_static_bath");
  const double h = s.sys.hbar, d = s.separation;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const double law = s.spin
        ? spin_coherence_norm(t, s.j, s.alpha, s.beta, s.omega, ops_moments, h).value
        : std::exp(-d * d * ops_moments.var_B * t * t / (h * h));
    std::vector<double> row{t, curve.values[i], law, memory_kernel_norm(t, d, h, corr)};
    if (spins) row.push_back(static_bath_norm(d, s.bath, t, h));
    table.rows.push_back(std::move(row));
  }
  try {
    const auto fit = fit_decay_exponent(curve);
    table.summary.emplace_back("fit_n", fit.n);
    table.summary.emplace_back("fit_tau", fit.tau);
  } catch (const ValidationError&) {
    // Too few points in the window for a fit; the curve itself is the result.
  }
  return table;
}

ResultTable run_spin(const ExperimentConfig& c, const RunSettings& settings) {
  const double hbar = c.number("spin.hbar", 1.0);
  const double j = c.number("spin.j");
  const double omega = c.number("spin.omega", 0.0);
  const cplx alpha = complex_pair(c, "spin.alpha");
  cplx beta;
  if (c.has("spin.pair")) {
    const std::string p = c.text("spin.pair");
    require(p == "i" || p == "ii" || p == "iii", ErrorCode::invalid_argument,
            "spin.pair must be i, ii or iii");
    beta = special_pair(alpha, p == "i" ? PairCase::i : p == "ii" ? PairCase::ii : PairCase::iii);
  } else {
    beta = complex_pair(c, "spin.beta");
  }
  const auto bath = bath_moments_config(c);
  const bool mc = bath.var_Bdot.has_value();
  SpinNormOptions mc_options;
  mc_options.mode = SpinNormMode::montecarlo;
  mc_options.samples = std::uint64_t(c.integer("montecarlo.samples", 100000));
  mc_options.seed = settings.seed.value_or(std::uint64_t(c.integer("montecarlo.seed", 0)));

  const auto d = separations(j, alpha, beta, hbar);
  const auto tau = spin_decoherence_times(j, alpha, beta, omega, bath, hbar);
  ResultTable table;
  table.columns = {"t", "norm_regime"};
  if (mc) table.columns.insert(table.columns.end(), {"norm_montecarlo", "montecarlo_stderr"});
  const auto times = time_grid(c);
  table.rows = parallel_rows(times.size(), settings.threads, [&](std::size_t i) {
    const double t = times[i];
    std::vector<double> row{t, spin_coherence_norm(t, j, alpha, beta, omega, bath, hbar).value};
    if (mc) {
      const auto e = spin_coherence_norm(t, j, alpha, beta, omega, bath, hbar, mc_options);
      row.push_back(e.value);
      row.push_back(e.std_error);
    }
    return row;
  });
  table.summary = {{"d_x", d.d_x},
                   {"d_y", d.d_y},
                   {"d_z", d.d_z},
                   {"tau_x", tau.tau_x.or_infinity()},
                   {"tau_y", tau.tau_y.or_infinity()},
                   {"tau_z", tau.tau_z.or_infinity()}};
  return table;
}

ResultTable run_expansion_check(const ExperimentConfig& c, const RunSettings& settings) {
  const long long dim = c.integer("expansion.dim", 4);
  const long long trials = c.integer("expansion.trials", 10);
  const double scale = c.number("expansion.scale", 0.05);
  const double hbar = c.number("expansion.hbar", 1.0);
  const std::uint64_t seed = settings.seed.value_or(std::uint64_t(c.integer("expansion.seed", 1)));
  require(dim >= 2 && dim <= 64, ErrorCode::range, "expansion.dim must lie in [2, 64]");
  require(trials >= 1, ErrorCode::range, "expansion.trials must be >= 1");
  require(scale > 0.0 && scale < 1.0, ErrorCode::range, "expansion.scale must lie in (0, 1)");

  ResultTable table;
  table.columns = {"trial", "t", "error_t", "error_half", "ratio"};
  table.rows = parallel_rows(std::size_t(trials), settings.threads, [&](std::size_t k) {
    ExpandedHamiltonian h;
    h.h0 = random_hermitian(int(dim), seed + 3 * k);
    h.h1 = random_hermitian(int(dim), seed + 3 * k + 1);
    h.h2 = random_hermitian(int(dim), seed + 3 * k + 2);
    h.hbar = hbar;
    const double t = scale / spectral_norm(h.h0);
    const HamiltonianPath path = [&h](double s) { return h.at(s); };
    const double e1 = expansion_error(h, path, t).distance;
    const double e2 = expansion_error(h, path, t / 2.0).distance;
    return std::vector<double>{double(k), t, e1, e2, e1 / e2};
  });
  double lo = kInf, hi = -kInf;
  for (const auto& r : table.rows) {
    lo = std::min(lo, r[4]);
    hi = std::max(hi, r[4]);
  }
  table.summary = {{"ratio_min", lo}, {"ratio_max", hi}};
  return table;
}

ResultTable run_clt(const ExperimentConfig& c) {
  const double var = c.number("clt.var_B", 1.0);
  const long long points = c.integer("clt.lambda_points", 2001);
  require(var > 0.0, ErrorCode::invalid_argument, "clt.var_B must be positive");
  require(points >= 3, ErrorCode::range, "clt.lambda_points must be >= 3");
  std::vector<long long> ms;
  std::stringstream ss(c.text("clt.components", "4,8,16,32"));
  for (std::string item; std::getline(ss, item, ',');) ms.push_back(parse_integer("clt.components", item));
  require(!ms.empty(), ErrorCode::range, "clt.components is empty");
  const double reach = 3.0 / std::sqrt(var);
  const auto lambdas = linspace(-reach, reach, std::size_t(points));
  ResultTable table;
  table.columns = {"components", "sup_distance"};
  for (long long m : ms) {
    require(m >= 1 && m <= 4096, ErrorCode::range, "clt.components entries must lie in [1, 4096]");
    BathModel bath = BathModel::equal_spins(int(m), var);
    bath.dimension_cap = std::numeric_limits<std::size_t>::max();
    double sup = 0.0;
    for (double l : lambdas)
      sup = std::max(sup, std::abs(bath_characteristic(bath, l) - std::exp(-0.5 * l * l * var)));
    table.rows.push_back({double(m), sup});
  }
  return table;
}

}  // namespace

// ---------------------------------------------------------------- public API

std::string_view version() { return DECOLAB_VERSION; }

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(ErrorCode::invalid_argument, std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      c.values_[section] = trim(body.data());
      continue;
    }
    for (const auto& [key, value] : body) c.values_[section + "." + key] = trim(value.data());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(ErrorCode::invalid_argument, "cannot read config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ExperimentConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError(ErrorCode::invalid_argument, "missing config key " + key);
  return it->second;
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double ExperimentConfig::number(const std::string& key) const { return parse_double(key, text(key)); }

double ExperimentConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long ExperimentConfig::integer(const std::string& key) const {
  return parse_integer(key, text(key));
}

long long ExperimentConfig::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(ErrorCode::invalid_argument, key + ": expected true or false");
}

std::string ExperimentConfig::hash() const {
  std::string canon;
  for (const auto& [k, v] : values_) canon += k + "=" + v + "\n";
  return hex16(fnv1a(canon));
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"times", "norm", "sweep", "oracle-compare",
                                              "spin", "expansion-check", "clt"};
  return kinds;
}

ResultTable run_experiment(const std::string& kind, const ExperimentConfig& config,
                           const RunSettings& settings) {
  require(settings.threads >= 1, ErrorCode::invalid_argument, "threads must be >= 1");
  if (kind == "times") return run_times(config);
  if (kind == "norm") return run_norm(config);
  if (kind == "sweep") return run_sweep(config, settings);
  if (kind == "oracle-compare") return run_oracle_compare(config, settings);
  if (kind == "spin") return run_spin(config, settings);
  if (kind == "expansion-check") return run_expansion_check(config, settings);
  if (kind == "clt") return run_clt(config);
  throw ValidationError(ErrorCode::invalid_argument, "unknown experiment '" + kind + "'");
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string to_csv(const ResultTable& table, const std::string& config_hash) {
  std::string out;
  for (const auto& col : table.columns) out += col + ",";
  out += "config_hash,version\n";
  for (const auto& row : table.rows) {
    for (double x : row) out += format_number(x) + ",";
    out += config_hash + "," + std::string(version()) + "\n";
  }
  return out;
}

std::string to_json(const ResultTable& table, const std::string& kind,
                    const std::string& config_hash) {
  // Numbers go through format_number so infinities survive and output is
  // byte-stable.
  nlohmann::ordered_json j;
  j["experiment"] = kind;
  j["config_hash"] = config_hash;
  j["version"] = std::string(version());
  j["columns"] = table.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : table.rows) {
    auto row = nlohmann::ordered_json::array();
    for (double x : r) row.push_back(format_number(x));
    rows.push_back(row);
  }
  j["rows"] = rows;
  auto summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.summary) summary[k] = format_number(v);
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

std::string config_template(const std::string& kind) {
  const std::string head = "; decolab " + kind + " configuration\n; comments start with ; or #\n";
  const std::string system =
      "[system]\n; particle mass (inf freezes the particle), oscillator frequency, hbar\n"
      "mass = 1\nomega = 0\nhbar = 1\n\n";
  const std::string time = "[time]\nt_min = 0\nt_max = 1\npoints = 101\n; linear or log\nspacing = linear\n\n";
  const std::string output = "[output]\n; also write <out>.json next to the CSV\njson = false\n";
  if (kind == "times")
    return head + system + "[packets]\n; signed separations q1 - q2 and p1 - p2\ndq = 2\ndp = 0\n\n"
                           "[bath]\nvar_B = 1\n\n" + output;
  if (kind == "sweep")
    return head + system + "[packets]\ndq = 1\ndp = 1\n\n[bath]\nvar_B = 1\n\n"
                           "[correlation]\n; optional: exponential (gamma), gaussian (tau) or constant\n"
                           "kind = exponential\ngamma = 1\n\n"
                           "[sweep]\n; hbar, dq, dp, mass or var_B\naxis = hbar\nfrom = 0.01\nto = 1\n"
                           "points = 8\nspacing = log\n\n" + output;
  if (kind == "norm")
    return head + system + "[packets]\nq1 = 1\nq2 = -1\np1 = 0\np2 = 0\nsigma = 0.01\n\n"
                           "[bath]\nvar_B = 1\n\n[correlation]\nkind = exponential\ngamma = 1\n\n" +
           time + output;
  if (kind == "oracle-compare")
    return head + "[system]\nhbar = 1\n\n"
                  "[oracle]\n; particle or spin\nsystem = particle\nq_min = -2\nq_max = 2\nn_points = 16\n"
                  "; inf freezes the particle\nmass = inf\n; point or packet\nbranches = point\n"
                  "q1 = 0.5\nq2 = -0.5\n; sigma, p1, p2 for packet branches\n"
                  "; spin: j, omega, alpha_re, alpha_im, beta_re, beta_im\nmax_step = 0.001\n\n"
                  "[bath_model]\n; spin_half or oscillator (levels)\nkind = spin_half\ncomponents = 8\n"
                  "var_B = 1\nomega_min = 0\nomega_max = 0\ncap = 4096\n\n"
                  "; optional [sweep] with axis = hbar or distance reports e^-1 crossing times\n\n" +
           time + output;
  if (kind == "spin")
    return head + "[spin]\nj = 15\nomega = 1\nhbar = 1\nalpha_re = 1\nalpha_im = 0\n"
                  "; either beta_re/beta_im or pair = i, ii, iii\nbeta_re = -1\nbeta_im = 0\n\n"
                  "[bath]\nvar_B = 1\n; set var_Bdot to add the Monte-Carlo columns\nvar_Bdot = 0\n\n"
                  "[montecarlo]\nsamples = 100000\nseed = 0\n\n" + time + output;
  if (kind == "expansion-check")
    return head + "[expansion]\ndim = 4\ntrials = 10\n; |H0| t at the coarse time\nscale = 0.05\n"
                  "seed = 1\nhbar = 1\n\n" + output;
  if (kind == "clt")
    return head + "[clt]\nvar_B = 1\ncomponents = 4,8,16,32\nlambda_points = 2001\n\n" + output;
  throw ValidationError(ErrorCode::invalid_argument, "unknown experiment '" + kind + "'");
}

ScalingFit fit_scaling(std::span<const double> coordinate, std::span<const double> tau,
                       ScalingAxis axis) {
  require(coordinate.size() == tau.size(), ErrorCode::dimension_mismatch,
          "fit_scaling: coordinate and tau differ in length");
  require(coordinate.size() >= 4, ErrorCode::insufficient_data, "fit_scaling needs >= 4 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    require(coordinate[i] > 0.0 && tau[i] > 0.0 && std::isfinite(coordinate[i]) && std::isfinite(tau[i]),
            ErrorCode::range, "fit_scaling: log axes need positive finite values");
    lx.push_back(std::log(coordinate[i]));
    ly.push_back(std::log(tau[i]));
  }
  const auto f = fit_line(lx, ly);
  const double sign = axis == ScalingAxis::hbar ? 1.0 : -1.0;
  return {sign * f.slope, f.slope_stderr};
}

std::vector<std::vector<double>> parallel_rows(
    std::size_t n, int threads, const std::function<std::vector<double>(std::size_t)>& f) {
  std::vector<std::vector<double>> out(n);
  const std::size_t workers = std::min<std::size_t>(n, std::size_t(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  // Report the failure of the earliest sweep point, whatever finished first.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"decolab: decoherence laws and an exact finite-bath oracle"};
  std::string experiment, config_path, out_path;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool emit = false;
  app.add_option("experiment", experiment, "times | norm | sweep | oracle-compare | spin | expansion-check | clt")
      ->required();
  app.add_option("--config", config_path, "INI configuration file");
  app.add_option("--out", out_path, "write CSV here instead of stdout");
  app.add_option("--seed", seed, "overrides the seed in the config");
  app.add_option("--threads", threads, "worker threads for sweep points")->check(CLI::PositiveNumber);
  app.add_flag("--emit-config", emit, "print a commented config template and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (std::find(experiment_kinds().begin(), experiment_kinds().end(), experiment) ==
        experiment_kinds().end())
      throw ValidationError(ErrorCode::invalid_argument, "unknown experiment '" + experiment + "'");
    if (emit) {
      std::cout << config_template(experiment);
      return 0;
    }
    require(!config_path.empty(), ErrorCode::invalid_argument, "--config is required");
    ExperimentConfig config = ExperimentConfig::load(config_path);
    config.set("run.experiment", experiment);
    if (seed) config.set("run.seed", std::to_string(*seed));
    RunSettings settings{seed, threads};
    const ResultTable table = run_experiment(experiment, config, settings);
    const std::string hash = config.hash();
    const std::string csv = to_csv(table, hash);
    if (out_path.empty()) {
      std::cout << csv;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ValidationError(ErrorCode::invalid_argument, "cannot write " + out_path);
      f << csv;
      if (config.flag("output.json", false)) {
        std::ofstream j(out_path + ".json", std::ios::binary);
        j << to_json(table, experiment, hash);
      }
    }
    for (const auto& [k, v] : table.summary) std::cerr << "# " << k << " = " << format_number(v) << "\n";
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: validation: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "error: numerical: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: validation: invalid_argument: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace decolab
