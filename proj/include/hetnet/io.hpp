#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hetnet/scenario.hpp"
#include "hetnet/sweep.hpp"

namespace hetnet {

/// Experiment knobs for sweeps and figure reproduction.
struct ExperimentConfig {
  std::size_t realizations = 20;
  std::size_t k_step = 1;        // lambda_max figures: K = k_step, 2 k_step, ... < M
  std::size_t delay_k_step = 5;  // delay figures
  std::vector<double> lambda_factors{0.3, 0.5, 0.7};
  double epsilon = 0.02;        // s
  double relaxation_tol = 1e-4; // relative to the zero-load delay
  std::size_t max_nodes = 20000;
  std::size_t delay_max_nodes = 20000;
  std::size_t workers = 0;  // 0: HETNET_WORKERS or hardware concurrency

  bool operator==(const ExperimentConfig&) const = default;
  void validate() const;
};

struct RunConfig {
  ScenarioConfig scenario;
  ExperimentConfig experiment;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const ScenarioConfig& c);
nlohmann::json to_json(const ExperimentConfig& c);
nlohmann::json to_json(const RunConfig& c);

/// Strict parsers: unknown keys, wrong types and invalid values throw
/// ConfigError.  Missing keys take their defaults.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ExperimentConfig experiment_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
std::string format_double(double v);

/// RFC 4180 writer: fields containing a comma, quote, CR or LF are quoted
/// with embedded quotes doubled; records end in CRLF.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};
std::string csv_escape(std::string_view field);

/// ra, k, rule, beta, lambda, metric_name, value, bound, certificate, iterations, seed
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// ra, k, rule, beta, lambda, metric_name, mean, samples, failures
void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& points);

}  // namespace hetnet
