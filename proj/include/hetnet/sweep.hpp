#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/phy.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/solvers.hpp"

namespace hetnet {

/// Link table and service model of one (scenario, RA, K) instance.
struct Instance {
  RaScheme ra;
  LinkTable link;
  ServiceModel model;
};

Instance make_instance(const Scenario& scenario, const RaScheme& ra, const McsTable& mcs = {});

/// The same realisation with no small cells; the traffic profile is kept.
Scenario without_small_cells(const Scenario& scenario);

/// Seed of realisation `index` derived from a base seed (splitmix64).
std::uint64_t realization_seed(std::uint64_t base, std::size_t index);

/// Rule associations evaluated by the sweep.  SCF appears once per beta.
struct RuleChoice {
  UaRule rule = UaRule::best_sinr;
  std::optional<double> beta_db;
};
std::string rule_label(const RuleChoice& r);
Association apply_rule(const RuleChoice& r, const Scenario& scenario, const Instance& inst);

struct SweepSpec {
  MetricKind metric = MetricKind::lambda_max;
  std::vector<RaKind> schemes{RaKind::ccd, RaKind::od, RaKind::psd};
  std::vector<std::size_t> k_values;  // empty: 1..M-1
  std::vector<RuleChoice> rules;
  bool optimal = true;
  bool baseline = true;  // optimal UA with no small cells (CCD, lambda_max only)
  /// Seed the exact solver with the rule associations and the previous K's
  /// optimum.  Warm starts never change a proven bound.
  bool warm_start = true;
  std::vector<double> lambdas;  // delay metrics only
  std::size_t realizations = 1;
  std::uint64_t seed = 1;
  /// Explicit scenario seeds; when set they replace realization_seed(seed, r)
  /// and their count replaces `realizations`.
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 1;
  double epsilon = 0.02;   // minmax delay bisection width, s
  /// Relaxation tolerance relative to the zero-load average delay; the
  /// absolute tolerance on sum 1/(1-rho) is tol * lambda * sum_i alpha_i min_j tau_ij.
  double tol = 1e-4;
  MinMaxLoadOptions load_options;
  DelayOptions delay_options;
  RelaxationOptions relaxation_options;
};

/// Every SCF beta from the MCS threshold set plus best SINR and RE.
std::vector<RuleChoice> default_rules(const McsTable& mcs = {});

struct SweepRow {
  std::size_t realization = 0;
  std::uint64_t seed = 0;
  std::string ra;  // ccd | od | psd | baseline
  std::optional<std::size_t> k;
  std::string rule;  // best-sinr | re | scf | optimal
  std::optional<double> beta;
  std::optional<double> lambda;
  std::string metric;
  double value = 0.0;
  std::optional<double> bound;  // solver rows: the companion bound of OptResult
  std::string certificate;  // "exact" for closed-form rule values, or an error marker
  std::size_t iterations = 0;
  bool ok = true;
};

/// Runs every (realisation, scheme, K, rule) cell.  Rows are ordered by
/// realisation, scheme, K, lambda and rule regardless of worker scheduling.
/// Per-cell failures become rows with ok = false.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec);

/// Mean over the successful realisations of one curve point.
struct CurvePoint {
  std::string ra;
  std::optional<std::size_t> k;
  std::string rule;
  std::optional<double> beta;
  std::optional<double> lambda;
  std::string metric;
  double mean = 0.0;
  std::size_t samples = 0;
  std::size_t failures = 0;
};
std::vector<CurvePoint> aggregate(const std::vector<SweepRow>& rows, std::size_t realizations);

/// Best point per (ra, rule, lambda, metric) over K and beta: max for
/// lambda_max, min for the delay metrics.  Points with any failed
/// realisation are skipped.
std::vector<CurvePoint> best_over_k(const std::vector<CurvePoint>& points);

}  // namespace hetnet
