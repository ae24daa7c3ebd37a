#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace decolab {

std::string_view version();

/// Flat view of an INI file: "section.key" -> value.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  /// FNV-1a over the sorted key/value pairs, as 16 hex digits.
  std::string hash() const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  /// Scalar summaries (fitted exponents etc.) reported alongside the rows.
  std::vector<std::pair<std::string, double>> summary;
};

struct RunSettings {
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

const std::vector<std::string>& experiment_kinds();

/// Throws ValidationError for unknown kinds or bad configs.
ResultTable run_experiment(const std::string& kind, const ExperimentConfig& config,
                           const RunSettings& settings = {});

/// CSV with the table columns followed by config_hash and version.
std::string to_csv(const ResultTable& table, const std::string& config_hash);
std::string to_json(const ResultTable& table, const std::string& kind,
                    const std::string& config_hash);

/// Commented INI template for an experiment kind.
std::string config_template(const std::string& kind);

/// Shortest round-trip decimal form; "inf"/"-inf"/"nan" otherwise.
std::string format_number(double x);

enum class ScalingAxis { hbar, distance, j };

struct ScalingFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
};

/// Log-log least squares of tau against the sweep coordinate. Reports the
/// exponent as it appears in tau ~ hbar^mu / d^nu: +slope on the hbar axis,
/// -slope on the distance and j axes.
ScalingFit fit_scaling(std::span<const double> coordinate, std::span<const double> tau,
                       ScalingAxis axis);

/// Evaluates f(0..n-1) on `threads` workers; results keep index order.
std::vector<std::vector<double>> parallel_rows(std::size_t n, int threads,
                                               const std::function<std::vector<double>(std::size_t)>& f);

/// Command-line entry point; returns the process exit status.
int run_cli(int argc, char** argv);

}  // namespace decolab
