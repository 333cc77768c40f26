#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/phy.hpp"
#include "hetnet/scenario.hpp"

namespace hetnet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Everything the queueing formulas need from a (scenario, RA, K) instance:
/// per-class arrival weights and the bare transmission time F / (K_j r_ij) of
/// a mean-size file for every (location, queue) pair.  Pairs out of coverage
/// carry +inf.
class ServiceModel {
 public:
  ServiceModel() = default;
  /// `capacity_bps` is row-major [location][queue] holding K_j * r_ij.
  ServiceModel(std::size_t queue_count, std::vector<double> alpha, const std::vector<double>& capacity_bps,
               double file_size_bits);

  static ServiceModel from_link(const LinkTable& link, const TrafficProfile& traffic, double file_size_bits);

  std::size_t location_count() const { return alpha_.size(); }
  std::size_t queue_count() const { return queue_count_; }
  double alpha(std::size_t i) const { return alpha_[i]; }
  const std::vector<double>& alpha() const { return alpha_; }
  double file_size() const { return file_size_; }
  double alpha_sum() const { return alpha_sum_; }

  /// F / (K_j r_ij) in seconds, +inf when j cannot serve i.
  double service_time(std::size_t i, std::size_t j) const { return service_[i * queue_count_ + j]; }
  bool allowed(std::size_t i, std::size_t j) const { return service_[i * queue_count_ + j] < kInf; }
  /// Work brought per unit arrival rate: alpha_i * F / (K_j r_ij).
  double unit_load(std::size_t i, std::size_t j) const { return alpha_[i] * service_time(i, j); }

  /// Queues that can serve location i, ascending.
  const std::vector<std::size_t>& options(std::size_t i) const { return options_[i]; }

 private:
  std::size_t queue_count_ = 0;
  std::vector<double> alpha_;
  std::vector<double> service_;
  std::vector<std::vector<std::size_t>> options_;
  double file_size_ = 0.0;
  double alpha_sum_ = 0.0;
};

struct LoadVector {
  std::vector<double> rho;

  double max() const;
};

struct DelayReport {
  std::vector<double> t_per_class;  // T_i, seconds
  std::vector<double> rho;
  double t_system = 0.0;            // T, the average system delay
  double t_max = 0.0;               // max_i T_i
  double sum_lambda_t = 0.0;        // sum_i lambda_i T_i
  double sum_rho_ratio = 0.0;       // sum_j rho_j / (1 - rho_j)
  bool above_cap = false;           // some rho_j in (rho_bar, 1)
  bool zero_weight_classes = false; // t_max includes locations with alpha_i = 0
};

LoadVector loads(const Association& assoc, const ServiceModel& model, double lambda);

/// True iff rho_j <= rho_bar for every queue (boundary inclusive).
bool is_stable(const LoadVector& load, double rho_bar);

/// rho_bar / max_j sum_{i -> j} alpha_i F / (K_j r_ij); +inf without traffic.
double lambda_max_of_rule(const Association& assoc, const ServiceModel& model, double rho_bar);

/// Per-class and system delays of the M/G/1-PS queues.  Throws UnstableError
/// if any rho_j >= 1.  `rho_bar` only sets the `above_cap` flag.
DelayReport delays(const Association& assoc, const ServiceModel& model, double lambda, double rho_bar = 1.0);

}  // namespace hetnet
