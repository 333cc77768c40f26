#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/queueing.hpp"

namespace hetnet {

/// c_ij = alpha_i F / (K_j r_ij) in seconds; +inf marks a forbidden pair.
class AssignCosts {
 public:
  AssignCosts(std::size_t location_count, std::size_t queue_count, std::vector<double> cost);
  static AssignCosts from_model(const ServiceModel& model);

  std::size_t location_count() const { return locations_; }
  std::size_t queue_count() const { return queues_; }
  double operator()(std::size_t i, std::size_t j) const { return cost_[i * queues_ + j]; }
  const std::vector<std::size_t>& options(std::size_t i) const { return options_[i]; }

 private:
  std::size_t locations_;
  std::size_t queues_;
  std::vector<double> cost_;
  std::vector<std::vector<std::size_t>> options_;
};

enum class Certificate {
  optimal,         // proven optimal
  within_gap,      // incumbent plus a proven bound that does not meet it
  within_epsilon,  // bisection bracket of width <= epsilon, every verdict proven
  upper_bound,     // bisection bracket with unproven infeasibility verdicts
  lower_bound,     // relaxation bound with a computed duality gap
};
std::string_view to_string(Certificate c);

enum class MetricKind { lambda_max, minmax_delay, avgdelay_lb };
std::string_view to_string(MetricKind m);

struct OptResult {
  MetricKind kind = MetricKind::lambda_max;
  std::optional<std::size_t> k;
  double value = 0.0;
  /// Companion bound: for lambda_max an upper bound on the optimum, for
  /// minmax_delay the lower end of the final bracket, for avgdelay_lb the
  /// relaxation's primal objective.
  double bound = 0.0;
  double gap = 0.0;
  std::optional<Association> association;
  Certificate certificate = Certificate::optimal;
  std::size_t iterations = 0;
  double wallclock_s = 0.0;
};

struct MinMaxLoadOptions {
  std::size_t max_nodes = 200000;  // branch-and-bound nodes created
  std::size_t lagrangian_iterations = 400;
  double relative_gap = 1e-12;
};

struct MinMaxLoadResult {
  Association association;
  double value = 0.0;        // max_j load_j of `association`
  double lower_bound = 0.0;  // proven lower bound on the optimum
  bool optimal = false;
  std::size_t nodes = 0;
};

/// Minimises max_j sum_{i -> j} c_ij over total assignments.  Warm starts are
/// optional incumbents; they never affect the proven bound.
MinMaxLoadResult solve_minmax_load(const AssignCosts& costs, const MinMaxLoadOptions& options = {},
                                   std::span<const Association> warm_starts = {});

/// Maximum stable arrival rate over all associations: rho_bar / Lambda*.
OptResult lambda_max_optimal(const ServiceModel& model, double rho_bar, const MinMaxLoadOptions& options = {},
                             std::span<const Association> warm_starts = {});

enum class Verdict { feasible, infeasible, unknown };

struct FeasibilityResult {
  Verdict verdict = Verdict::unknown;
  std::optional<Association> witness;
  std::size_t nodes = 0;
};

struct DelayOptions {
  std::size_t max_nodes = 200000;  // per feasibility call
  MinMaxLoadOptions load_options;
};

/// Does some association keep every rho_j <= rho_bar and every class delay
/// F / ((1 - rho_j) K_j r_ij) <= t?  `hints` are candidate witnesses.
FeasibilityResult delay_feasible(double t, double lambda, const ServiceModel& model, double rho_bar,
                                 const DelayOptions& options = {}, std::span<const Association> hints = {});

/// Largest per-class delay of an association at arrival rate lambda.
double max_class_delay(const Association& assoc, const ServiceModel& model, double lambda);

/// Bisection over delay_feasible on [0, t0]; t0 comes from the min-max-load
/// association.  Throws InfeasibleError if lambda exceeds the optimal lambda_max.
OptResult minmax_delay(double lambda, const ServiceModel& model, double rho_bar, double epsilon,
                       const DelayOptions& options = {}, std::span<const Association> hints = {});

struct RelaxationOptions {
  std::size_t max_sweeps = 20000;
  MinMaxLoadOptions load_options{.max_nodes = 0};
  /// Stop early once the certified lower value exceeds this (used to skip
  /// K values that cannot beat the best found so far).
  double abandon_above = kInf;
};

/// Lower bound on the optimal average system delay from the fractional
/// relaxation of sum_j 1 / (1 - rho_j).  `value` is the reported bound,
/// `bound` the primal objective q, `gap` the certified duality gap.
OptResult avgdelay_lower_bound(double lambda, const ServiceModel& model, double rho_bar, double tol,
                               const RelaxationOptions& options = {}, std::span<const Association> hints = {});

}  // namespace hetnet
