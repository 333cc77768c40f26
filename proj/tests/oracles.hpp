#pragma once

// Brute-force reference computations for tiny instances.  They recompute
// loads and delays from the raw service-time table so they share no code
// with the solvers under test.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/queueing.hpp"

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Random instance: L locations, J queues, about `zero_prob` of the pairs
/// forbidden (every location keeps at least one queue).
inline hetnet::ServiceModel random_model(std::mt19937_64& rng, std::size_t l, std::size_t j, double zero_prob = 0.2,
                                         double file_size = 1e6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> cap(1e6, 5e7);
  std::vector<double> alpha(l);
  double total = 0.0;
  for (auto& a : alpha) total += (a = 0.05 + u(rng));
  for (auto& a : alpha) a /= total;
  std::vector<double> c(l * j);
  for (std::size_t i = 0; i < l; ++i) {
    bool any = false;
    for (std::size_t q = 0; q < j; ++q) {
      c[i * j + q] = u(rng) < zero_prob ? 0.0 : cap(rng);
      any = any || c[i * j + q] > 0.0;
    }
    if (!any) c[i * j + std::uniform_int_distribution<std::size_t>(0, j - 1)(rng)] = cap(rng);
  }
  return hetnet::ServiceModel(j, alpha, c, file_size);
}

/// Calls fn on every total assignment over allowed pairs.
inline void for_each_assignment(const hetnet::ServiceModel& m, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  const std::size_t l = m.location_count();
  std::vector<std::size_t> idx(l, 0), t(l);
  std::vector<std::vector<std::size_t>> opts(l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t q = 0; q < m.queue_count(); ++q)
      if (std::isfinite(m.service_time(i, q))) opts[i].push_back(q);
  while (true) {
    for (std::size_t i = 0; i < l; ++i) t[i] = opts[i][idx[i]];
    fn(t);
    std::size_t p = 0;
    while (p < l && ++idx[p] == opts[p].size()) idx[p++] = 0;
    if (p == l) return;
  }
}

inline std::vector<double> unit_loads(const hetnet::ServiceModel& m, const std::vector<std::size_t>& t) {
  std::vector<double> w(m.queue_count(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) w[t[i]] += m.alpha(i) * m.service_time(i, t[i]);
  return w;
}

/// Largest lambda keeping every queue at or below rho_bar, over all assignments.
inline double lambda_max(const hetnet::ServiceModel& m, double rho_bar) {
  double best = 0.0;
  for_each_assignment(m, [&](const std::vector<std::size_t>& t) {
    double worst = 0.0;
    for (const double w : unit_loads(m, t)) worst = std::max(worst, w);
    best = std::max(best, worst > 0.0 ? rho_bar / worst : kInf);
  });
  return best;
}

/// max_i T_i of one assignment, +inf if some load exceeds rho_bar.
inline double max_delay(const hetnet::ServiceModel& m, const std::vector<std::size_t>& t, double lambda, double rho_bar) {
  const auto w = unit_loads(m, t);
  double worst = 0.0;
  for (const double x : w)
    if (lambda * x > rho_bar) return kInf;
  for (std::size_t i = 0; i < t.size(); ++i)
    worst = std::max(worst, m.service_time(i, t[i]) / (1.0 - lambda * w[t[i]]));
  return worst;
}

/// Average system delay of one assignment, +inf if some load exceeds rho_bar.
inline double avg_delay(const hetnet::ServiceModel& m, const std::vector<std::size_t>& t, double lambda, double rho_bar) {
  const auto w = unit_loads(m, t);
  for (const double x : w)
    if (lambda * x > rho_bar) return kInf;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    num += m.alpha(i) * m.service_time(i, t[i]) / (1.0 - lambda * w[t[i]]);
    den += m.alpha(i);
  }
  return num / den;
}

inline double min_over(const hetnet::ServiceModel& m,
                       const std::function<double(const std::vector<std::size_t>&)>& f) {
  double best = kInf;
  for_each_assignment(m, [&](const std::vector<std::size_t>& t) { best = std::min(best, f(t)); });
  return best;
}

}  // namespace oracle
