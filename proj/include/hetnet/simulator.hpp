#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/queueing.hpp"

namespace hetnet {

enum class FileSizeLaw { exponential, deterministic };

struct SimSpec {
  Association assoc;
  ServiceModel model;
  double lambda = 0.0;
  FileSizeLaw law = FileSizeLaw::exponential;
  double horizon_s = 1000.0;
  /// Defaults to 10% of the horizon.
  std::optional<double> warmup_s;
  std::uint64_t seed = 1;
  std::size_t replications = 10;
  std::size_t workers = 1;
  /// Event trace (time, queue, event, class, n_after); single-replication runs only.
  std::ostream* trace = nullptr;

  double warmup() const { return warmup_s.value_or(0.1 * horizon_s); }
  void validate() const;
};

/// Sample mean over replications with a 95% Student-t half width.
struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;

  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
  bool overlaps(const Estimate& other) const { return lo() <= other.hi() && other.lo() <= hi(); }
};

Estimate estimate(const std::vector<double>& samples);

struct QueueStats {
  Estimate number_in_system;  // time average over [warmup, horizon]
  Estimate sojourn;           // mean over jobs arriving in the window
  double offered_rate = 0.0;  // lambda * sum of member alphas
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
};

struct SimReport {
  std::vector<Estimate> per_class;  // samples = 0 when a class saw no arrivals
  Estimate system;
  double max_class_mean = 0.0;
  std::vector<QueueStats> queues;
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
  bool non_stationary = false;  // some rho_j >= 1
};

/// Processor-sharing simulation of every queue: with n jobs present each job
/// receives 1/n of its class's capacity K_j r_ij.
SimReport simulate(const SimSpec& spec);

/// |N_j - lambda_j W_j| / (lambda_j W_j) per queue, 0 for queues without traffic.
std::vector<double> littles_check(const SimReport& report);

}  // namespace hetnet
