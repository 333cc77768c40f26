#include "hetnet/queueing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hetnet/errors.hpp"

namespace hetnet {

ServiceModel::ServiceModel(std::size_t queue_count, std::vector<double> alpha, const std::vector<double>& capacity_bps,
                           double file_size_bits)
    : queue_count_(queue_count), alpha_(std::move(alpha)), file_size_(file_size_bits) {
  const std::size_t l = alpha_.size();
  if (capacity_bps.size() != l * queue_count_) throw std::invalid_argument("capacity table has the wrong shape");
  if (!(file_size_bits > 0.0)) throw std::invalid_argument("file size must be positive");
  service_.resize(capacity_bps.size());
  options_.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    if (!(alpha_[i] >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
    for (std::size_t j = 0; j < queue_count_; ++j) {
      const double c = capacity_bps[i * queue_count_ + j];
      if (c > 0.0) {
        service_[i * queue_count_ + j] = file_size_bits / c;
        options_[i].push_back(j);
      } else {
        service_[i * queue_count_ + j] = kInf;
      }
    }
  }
  alpha_sum_ = std::accumulate(alpha_.begin(), alpha_.end(), 0.0);
}

ServiceModel ServiceModel::from_link(const LinkTable& link, const TrafficProfile& traffic, double file_size_bits) {
  if (traffic.alpha.size() != link.location_count) throw std::invalid_argument("traffic/link size mismatch");
  std::vector<double> cap(link.rate.size());
  const std::size_t n = link.vbs_count();
  for (std::size_t i = 0; i < link.location_count; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cap[i * n + j] = static_cast<double>(link.channels(j)) * link.rate_at(i, j);
    }
  }
  return ServiceModel(n, traffic.alpha, cap, file_size_bits);
}

double LoadVector::max() const { return rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end()); }

namespace {

void check_targets(const Association& assoc, const ServiceModel& model) {
  if (assoc.target.size() != model.location_count()) throw std::invalid_argument("association size mismatch");
  for (std::size_t i = 0; i < assoc.target.size(); ++i) {
    if (assoc.target[i] >= model.queue_count() || !model.allowed(i, assoc.target[i])) {
      throw CoverageError(i, "location " + std::to_string(i) + " is associated with a queue that cannot serve it");
    }
  }
}

std::vector<double> unit_loads(const Association& assoc, const ServiceModel& model) {
  check_targets(assoc, model);
  std::vector<double> w(model.queue_count(), 0.0);
  for (std::size_t i = 0; i < assoc.target.size(); ++i) w[assoc.target[i]] += model.unit_load(i, assoc.target[i]);
  return w;
}

}  // namespace

LoadVector loads(const Association& assoc, const ServiceModel& model, double lambda) {
  LoadVector out;
  out.rho = unit_loads(assoc, model);
  for (auto& r : out.rho) r *= lambda;
  return out;
}

bool is_stable(const LoadVector& load, double rho_bar) {
  return std::all_of(load.rho.begin(), load.rho.end(), [&](double r) { return r <= rho_bar; });
}

double lambda_max_of_rule(const Association& assoc, const ServiceModel& model, double rho_bar) {
  const auto w = unit_loads(assoc, model);
  const double worst = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
  return worst > 0.0 ? rho_bar / worst : kInf;
}

DelayReport delays(const Association& assoc, const ServiceModel& model, double lambda, double rho_bar) {
  DelayReport r;
  r.rho = loads(assoc, model, lambda).rho;
  for (std::size_t j = 0; j < r.rho.size(); ++j) {
    if (!(r.rho[j] < 1.0)) {
      throw UnstableError(j, r.rho[j], "queue " + std::to_string(j) + " is unstable (rho = " +
                                           std::to_string(r.rho[j]) + ")");
    }
    if (r.rho[j] > rho_bar) r.above_cap = true;
    r.sum_rho_ratio += r.rho[j] / (1.0 - r.rho[j]);
  }
  const std::size_t l = model.location_count();
  r.t_per_class.resize(l);
  double weighted = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    const std::size_t j = assoc.target[i];
    r.t_per_class[i] = model.service_time(i, j) / (1.0 - r.rho[j]);
    r.t_max = std::max(r.t_max, r.t_per_class[i]);
    weighted += model.alpha(i) * r.t_per_class[i];
    if (model.alpha(i) == 0.0) r.zero_weight_classes = true;
  }
  r.sum_lambda_t = lambda * weighted;
  r.t_system = model.alpha_sum() > 0.0 ? weighted / model.alpha_sum() : 0.0;
  return r;
}

}  // namespace hetnet
