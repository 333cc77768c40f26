#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hetnet/errors.hpp"
#include "hetnet/solvers.hpp"

namespace hetnet {

namespace {

constexpr double kSlack = 1e-12;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool meets_delay(const Association& a, const ServiceModel& model, double lambda, double rho_bar, double t) {
  const auto rho = loads(a, model, lambda).rho;
  for (const double r : rho)
    if (r > rho_bar + kSlack) return false;
  for (std::size_t i = 0; i < a.target.size(); ++i) {
    const std::size_t j = a.target[i];
    if (model.service_time(i, j) > t * (1.0 - rho[j]) * (1.0 + kSlack)) return false;
  }
  return true;
}

/// Local search on max_i T_i that keeps every rho_j <= rho_bar.  Each queue's
/// worst class is the one with the largest bare service time.
class DelayState {
 public:
  DelayState(const ServiceModel& m, double lambda, double rho_bar, const std::vector<std::size_t>& target)
      : m_(m), lambda_(lambda), rho_bar_(rho_bar), target_(target), rho_(m.queue_count(), 0.0),
        members_(m.queue_count()) {
    for (std::size_t i = 0; i < target_.size(); ++i) {
      rho_[target_[i]] += lambda_ * m_.unit_load(i, target_[i]);
      members_[target_[i]].push_back(i);
    }
  }

  double queue_delay(std::size_t j) const { return queue_delay(j, rho_[j], worst_service(j, kNone)); }

  double objective() const {
    double v = 0.0;
    for (std::size_t j = 0; j < rho_.size(); ++j) v = std::max(v, queue_delay(j));
    return v;
  }

  const std::vector<std::size_t>& target() const { return target_; }

  void improve() {
    const std::size_t limit = 20 * target_.size() + 100;
    for (std::size_t step = 0; step < limit; ++step) {
      std::size_t top = 0;
      double cur = -1.0;
      for (std::size_t j = 0; j < rho_.size(); ++j) {
        const double v = queue_delay(j);
        if (v > cur) {
          cur = v;
          top = j;
        }
      }
      double best = cur * (1.0 - 1e-13);
      std::size_t bi = 0, bh = 0;
      bool found = false;
      for (const auto i : members_[top]) {
        const double w_out = lambda_ * m_.unit_load(i, top);
        const double top_after = queue_delay(top, rho_[top] - w_out, worst_service(top, i));
        for (const auto h : m_.options(i)) {
          if (h == top) continue;
          const double rh = rho_[h] + lambda_ * m_.unit_load(i, h);
          if (rh > rho_bar_) continue;
          const double worst_h = std::max(worst_service(h, kNone), m_.service_time(i, h));
          const double v = std::max(top_after, queue_delay(h, rh, worst_h));
          if (v < best) {
            best = v;
            bi = i;
            bh = h;
            found = true;
          }
        }
      }
      if (!found) return;
      auto& fm = members_[top];
      fm.erase(std::find(fm.begin(), fm.end(), bi));
      rho_[top] -= lambda_ * m_.unit_load(bi, top);
      if (fm.empty()) rho_[top] = 0.0;
      rho_[bh] += lambda_ * m_.unit_load(bi, bh);
      members_[bh].push_back(bi);
      target_[bi] = bh;
    }
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  double worst_service(std::size_t j, std::size_t skip) const {
    double w = 0.0;
    for (const auto i : members_[j])
      if (i != skip) w = std::max(w, m_.service_time(i, j));
    return w;
  }
  static double queue_delay(std::size_t, double rho, double worst) {
    if (worst == 0.0) return 0.0;
    return rho < 1.0 ? worst / (1.0 - rho) : kInf;
  }

  const ServiceModel& m_;
  double lambda_;
  double rho_bar_;
  std::vector<std::size_t> target_;
  std::vector<double> rho_;
  std::vector<std::vector<std::size_t>> members_;
};

/// Exact depth-first search for P'_delay(t) with constraint propagation.
class FeasibilitySearch {
 public:
  FeasibilitySearch(const ServiceModel& m, double lambda, double rho_bar, double t, std::size_t max_nodes)
      : m_(m), lambda_(lambda), t_(t), max_nodes_(max_nodes), rho_(m.queue_count(), 0.0),
        cap_(m.queue_count(), rho_bar), target_(m.location_count()), options_(m.location_count()) {
    for (std::size_t i = 0; i < m.location_count(); ++i) {
      for (const auto j : m.options(i)) {
        const double tau = m.service_time(i, j);
        if (tau <= t * (1.0 + kSlack)) options_[i].push_back(j);
      }
    }
    forward_check_ = m.location_count() * m.queue_count() <= 20000;
  }

  bool trivially_infeasible() const {
    return std::any_of(options_.begin(), options_.end(), [](const auto& o) { return o.empty(); });
  }

  Verdict run() {
    order_.resize(m_.location_count());
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<double> min_inc(m_.location_count(), kInf);
    for (std::size_t i = 0; i < min_inc.size(); ++i)
      for (const auto j : options_[i]) min_inc[i] = std::min(min_inc[i], increment(i, j));
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      if (options_[a].size() != options_[b].size()) return options_[a].size() < options_[b].size();
      return min_inc[a] > min_inc[b];
    });
    suffix_inc_.assign(order_.size() + 1, 0.0);
    for (std::size_t d = order_.size(); d-- > 0;) suffix_inc_[d] = suffix_inc_[d + 1] + min_inc[order_[d]];
    const bool found = dfs(0);
    if (found) return Verdict::feasible;
    return budget_hit_ ? Verdict::unknown : Verdict::infeasible;
  }

  const std::vector<std::size_t>& witness() const { return target_; }
  std::size_t nodes() const { return nodes_; }

 private:
  double increment(std::size_t i, std::size_t j) const { return lambda_ * m_.unit_load(i, j); }
  double limit(std::size_t i, std::size_t j) const {
    return std::min(cap_[j], 1.0 - m_.service_time(i, j) / t_);
  }
  bool fits(std::size_t i, std::size_t j) const { return rho_[j] + increment(i, j) <= limit(i, j) + kSlack; }

  bool dfs(std::size_t depth) {
    if (depth == order_.size()) return true;
    if (++nodes_ > max_nodes_) {
      budget_hit_ = true;
      return false;
    }
    // Aggregate slack must cover the cheapest placement of every remaining location.
    double slack = 0.0;
    for (std::size_t j = 0; j < rho_.size(); ++j) slack += std::max(0.0, cap_[j] - rho_[j]);
    if (suffix_inc_[depth] > slack + kSlack * static_cast<double>(rho_.size())) return false;
    if (forward_check_) {
      for (std::size_t d = depth; d < order_.size(); ++d) {
        const std::size_t i = order_[d];
        if (std::none_of(options_[i].begin(), options_[i].end(), [&](std::size_t j) { return fits(i, j); }))
          return false;
      }
    }
    const std::size_t i = order_[depth];
    std::vector<std::pair<double, std::size_t>> cand;
    for (const auto j : options_[i]) {
      if (fits(i, j)) cand.emplace_back(limit(i, j) - rho_[j] - increment(i, j), j);
    }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [room, j] : cand) {
      const double saved_cap = cap_[j];
      cap_[j] = limit(i, j);
      rho_[j] += increment(i, j);
      target_[i] = j;
      if (dfs(depth + 1)) return true;
      rho_[j] -= increment(i, j);
      cap_[j] = saved_cap;
      if (budget_hit_) return false;
    }
    return false;
  }

  const ServiceModel& m_;
  double lambda_;
  double t_;
  std::size_t max_nodes_;
  std::vector<double> rho_;
  std::vector<double> cap_;
  std::vector<std::size_t> target_;
  std::vector<std::vector<std::size_t>> options_;
  std::vector<std::size_t> order_;
  std::vector<double> suffix_inc_;
  bool forward_check_ = false;
  bool budget_hit_ = false;
  std::size_t nodes_ = 0;
};

}  // namespace

double max_class_delay(const Association& assoc, const ServiceModel& model, double lambda) {
  const auto rho = loads(assoc, model, lambda).rho;
  double worst = 0.0;
  for (std::size_t i = 0; i < assoc.target.size(); ++i) {
    const std::size_t j = assoc.target[i];
    worst = std::max(worst, rho[j] < 1.0 ? model.service_time(i, j) / (1.0 - rho[j]) : kInf);
  }
  return worst;
}

FeasibilityResult delay_feasible(double t, double lambda, const ServiceModel& model, double rho_bar,
                                 const DelayOptions& options, std::span<const Association> hints) {
  if (!(t > 0.0)) throw std::invalid_argument("delay target must be positive");
  FeasibilityResult r;
  FeasibilitySearch search(model, lambda, rho_bar, t, options.max_nodes);
  if (search.trivially_infeasible()) {
    r.verdict = Verdict::infeasible;
    return r;
  }
  for (const auto& h : hints) {
    if (h.target.size() == model.location_count() && meets_delay(h, model, lambda, rho_bar, t)) {
      r.verdict = Verdict::feasible;
      r.witness = h;
      return r;
    }
  }
  r.verdict = search.run();
  r.nodes = search.nodes();
  if (r.verdict == Verdict::feasible) r.witness = Association{search.witness()};
  return r;
}

OptResult minmax_delay(double lambda, const ServiceModel& model, double rho_bar, double epsilon,
                       const DelayOptions& options, std::span<const Association> hints) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const auto start = std::chrono::steady_clock::now();
  const auto costs = AssignCosts::from_model(model);
  const auto mm = solve_minmax_load(costs, options.load_options);
  if (lambda * mm.value > rho_bar) {
    if (lambda * mm.lower_bound > rho_bar) {
      throw InfeasibleError("arrival rate " + std::to_string(lambda) + " exceeds the maximum stable rate " +
                            std::to_string(rho_bar / mm.lower_bound));
    }
    throw BudgetExceeded("could not establish feasibility of the arrival rate within the node budget");
  }

  // Best known witness: the min-max-load association, polished by local
  // search on the per-class delay.  t0 stays the initial association's value.
  const double t0 = max_class_delay(mm.association, model, lambda);
  std::vector<Association> known{mm.association};
  for (const auto& h : hints) {
    if (h.target.size() == model.location_count() && is_stable(loads(h, model, lambda), rho_bar)) known.push_back(h);
  }
  Association best = mm.association;
  double best_value = t0;
  for (const auto& k : known) {
    DelayState st(model, lambda, rho_bar, k.target);
    st.improve();
    const double v = st.objective();
    if (v < best_value) {
      best_value = v;
      best.target = st.target();
    }
  }

  double lo = 0.0;
  double hi = t0;
  Association witness = mm.association;
  std::size_t calls = 0;
  bool proven = true;
  while (hi - lo > epsilon) {
    const double mid = 0.5 * (lo + hi);
    const std::array<Association, 2> seeds{best, witness};
    const auto fr = delay_feasible(mid, lambda, model, rho_bar, options, seeds);
    ++calls;
    if (fr.verdict == Verdict::feasible) {
      hi = mid;
      witness = *fr.witness;
    } else {
      if (fr.verdict == Verdict::unknown) proven = false;
      lo = mid;
    }
  }

  OptResult r;
  r.kind = MetricKind::minmax_delay;
  r.value = max_class_delay(witness, model, lambda);
  r.bound = lo;
  r.gap = r.value - lo;
  r.association = witness;
  r.certificate = proven ? Certificate::within_epsilon : Certificate::upper_bound;
  r.iterations = calls;
  r.wallclock_s = seconds_since(start);
  return r;
}

OptResult avgdelay_lower_bound(double lambda, const ServiceModel& model, double rho_bar, double tol,
                               const RelaxationOptions& options, std::span<const Association> hints) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t l = model.location_count();
  const std::size_t n = model.queue_count();

  auto objective_of = [&](const std::vector<double>& rho) {
    double q = 0.0;
    for (const double r : rho) q += r < 1.0 ? 1.0 / (1.0 - r) : kInf;
    return q;
  };

  // Start from the stable candidate with the smallest objective.
  std::vector<Association> starts(hints.begin(), hints.end());
  const auto costs = AssignCosts::from_model(model);
  const auto mm = solve_minmax_load(costs, options.load_options, hints);
  starts.push_back(mm.association);
  const Association* init = nullptr;
  double init_q = kInf;
  for (const auto& s : starts) {
    if (s.target.size() != l) continue;
    const double q = objective_of(loads(s, model, lambda).rho);
    if (q < init_q) {
      init_q = q;
      init = &s;
    }
  }
  if (init == nullptr) {
    if (lambda * mm.lower_bound > rho_bar) {
      throw InfeasibleError("relaxation infeasible: arrival rate " + std::to_string(lambda) +
                            " exceeds the fractional load capacity");
    }
    throw BudgetExceeded("no stable starting association for the relaxation");
  }

  // Sparse fractional rows: (queue, mass).
  std::vector<std::vector<std::pair<std::size_t, double>>> x(l);
  std::vector<double> rho(n, 0.0);
  for (std::size_t i = 0; i < l; ++i) {
    x[i].emplace_back(init->target[i], 1.0);
    rho[init->target[i]] += lambda * model.unit_load(i, init->target[i]);
  }

  // d/dx_ij of sum_j 1/(1-rho_j) is lambda a_ij / (1-rho_j)^2.
  auto grad = [&](std::size_t i, std::size_t j) {
    const double a = lambda * model.unit_load(i, j);
    return a / ((1.0 - rho[j]) * (1.0 - rho[j]));
  };
  auto fw_gap = [&]() {
    double g = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      if (model.alpha(i) == 0.0) continue;
      double lin = 0.0;
      for (const auto& [j, w] : x[i]) lin += w * grad(i, j);
      double best = kInf;
      for (const auto j : model.options(i)) best = std::min(best, grad(i, j));
      g += lin - best;
    }
    return std::max(g, 0.0);
  };

  double q = objective_of(rho);
  double gap = fw_gap();
  std::size_t sweep = 0;
  for (; sweep < options.max_sweeps && gap > tol; ++sweep) {
    if (q - gap > options.abandon_above) break;
    for (std::size_t i = 0; i < l; ++i) {
      if (model.alpha(i) == 0.0) continue;
      auto& row = x[i];
      // Toward vertex: cheapest gradient; away vertex: dearest in the support.
      std::size_t toward = model.options(i).front();
      double g_to = grad(i, toward);
      for (const auto j : model.options(i)) {
        const double g = grad(i, j);
        if (g < g_to) {
          g_to = g;
          toward = j;
        }
      }
      std::size_t away_pos = 0;
      double g_away = -1.0;
      for (std::size_t p = 0; p < row.size(); ++p) {
        const double g = grad(i, row[p].first);
        if (g > g_away) {
          g_away = g;
          away_pos = p;
        }
      }
      const std::size_t away = row[away_pos].first;
      if (away == toward || !(g_away > g_to * (1.0 + 1e-15))) continue;
      // Exact line search along e_toward - e_away.
      const double u = lambda * model.unit_load(i, away);
      const double v = lambda * model.unit_load(i, toward);
      const double su = std::sqrt(u), sv = std::sqrt(v);
      double delta = (su * (1.0 - rho[toward]) - sv * (1.0 - rho[away])) / (su * v + sv * u);
      delta = std::clamp(delta, 0.0, row[away_pos].second);
      if (!(delta > 0.0)) continue;
      rho[away] -= u * delta;
      rho[toward] += v * delta;
      row[away_pos].second -= delta;
      auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.first == toward; });
      if (it == row.end()) row.emplace_back(toward, delta);
      else it->second += delta;
      row.erase(std::remove_if(row.begin(), row.end(), [](const auto& e) { return !(e.second > 1e-15); }), row.end());
    }
    // Refresh loads from scratch to stop drift.
    std::fill(rho.begin(), rho.end(), 0.0);
    for (std::size_t i = 0; i < l; ++i)
      for (const auto& [j, w] : x[i]) rho[j] += lambda * model.unit_load(i, j) * w;
    q = objective_of(rho);
    gap = fw_gap();
  }

  // q - gap is a certified lower value for the relaxation (convexity); the
  // rho_bar caps are dropped, which can only lower it further.
  const double certified = std::max(q - std::max(gap, tol), 0.0);
  const double queues = static_cast<double>(n);
  OptResult r;
  r.kind = MetricKind::avgdelay_lb;
  r.value = std::max((certified - queues) / (lambda * model.alpha_sum()), 0.0);
  r.bound = q;
  r.gap = gap;
  r.certificate = Certificate::lower_bound;
  r.iterations = sweep;
  r.wallclock_s = seconds_since(start);
  return r;
}

}  // namespace hetnet
