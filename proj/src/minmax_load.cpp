#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

#include "hetnet/errors.hpp"
#include "hetnet/solvers.hpp"

namespace hetnet {

AssignCosts::AssignCosts(std::size_t location_count, std::size_t queue_count, std::vector<double> cost)
    : locations_(location_count), queues_(queue_count), cost_(std::move(cost)), options_(location_count) {
  if (cost_.size() != locations_ * queues_) throw std::invalid_argument("cost table has the wrong shape");
  for (std::size_t i = 0; i < locations_; ++i) {
    for (std::size_t j = 0; j < queues_; ++j) {
      const double c = cost_[i * queues_ + j];
      if (std::isnan(c) || c < 0.0) throw std::invalid_argument("costs must be non-negative");
      if (c < kInf) options_[i].push_back(j);
    }
  }
}

AssignCosts AssignCosts::from_model(const ServiceModel& model) {
  const std::size_t l = model.location_count();
  const std::size_t n = model.queue_count();
  std::vector<double> c(l * n);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = model.allowed(i, j) ? model.unit_load(i, j) : kInf;
  }
  return AssignCosts(l, n, std::move(c));
}

std::string_view to_string(Certificate c) {
  switch (c) {
    case Certificate::optimal: return "optimal";
    case Certificate::within_gap: return "within-gap";
    case Certificate::within_epsilon: return "within-epsilon";
    case Certificate::upper_bound: return "upper-bound";
    case Certificate::lower_bound: return "lower-bound";
  }
  return "?";
}

std::string_view to_string(MetricKind m) {
  switch (m) {
    case MetricKind::lambda_max: return "lambda_max";
    case MetricKind::minmax_delay: return "max_delay";
    case MetricKind::avgdelay_lb: return "avg_delay_lb";
  }
  return "?";
}

namespace {

/// Assignment with per-queue loads and member lists, for local search.
class LoadState {
 public:
  LoadState(const AssignCosts& c, const std::vector<std::size_t>& target)
      : c_(c), target_(target), pos_(target.size()), load_(c.queue_count(), 0.0), members_(c.queue_count()) {
    for (std::size_t i = 0; i < target_.size(); ++i) {
      load_[target_[i]] += c_(i, target_[i]);
      pos_[i] = members_[target_[i]].size();
      members_[target_[i]].push_back(i);
    }
  }

  double max_load() const { return *std::max_element(load_.begin(), load_.end()); }
  const std::vector<std::size_t>& target() const { return target_; }

  /// Moves and pairwise swaps off the most loaded queue until neither lowers
  /// the larger of the two touched loads.
  void improve() {
    const std::size_t limit = 50 * target_.size() + 100;
    for (std::size_t step = 0; step < limit; ++step) {
      const auto top = static_cast<std::size_t>(std::max_element(load_.begin(), load_.end()) - load_.begin());
      const double cur = load_[top];
      const double need = cur * (1.0 - 1e-13);
      double best = need;
      std::size_t bi = 0, bh = 0, bk = 0;
      bool swap = false, found = false;
      for (const auto i : members_[top]) {
        const double without = cur - c_(i, top);
        for (const auto h : c_.options(i)) {
          if (h == top) continue;
          const double m = std::max(without, load_[h] + c_(i, h));
          if (m < best) {
            best = m;
            bi = i;
            bh = h;
            found = true;
          }
        }
      }
      if (!found) {
        for (const auto i : members_[top]) {
          for (const auto h : c_.options(i)) {
            if (h == top) continue;
            const double base_h = load_[h] + c_(i, h);
            for (const auto k : members_[h]) {
              const double ck = c_(k, top);
              if (ck == kInf) continue;
              const double m = std::max(cur - c_(i, top) + ck, base_h - c_(k, h));
              if (m < best) {
                best = m;
                bi = i;
                bh = h;
                bk = k;
                swap = true;
                found = true;
              }
            }
          }
        }
      }
      if (!found) return;
      move(bi, bh);
      if (swap) move(bk, top);
    }
  }

 private:
  void move(std::size_t i, std::size_t to) {
    const std::size_t from = target_[i];
    auto& fm = members_[from];
    const std::size_t p = pos_[i];
    fm[p] = fm.back();
    pos_[fm[p]] = p;
    fm.pop_back();
    load_[from] -= c_(i, from);
    if (fm.empty()) load_[from] = 0.0;
    target_[i] = to;
    pos_[i] = members_[to].size();
    members_[to].push_back(i);
    load_[to] += c_(i, to);
  }

  const AssignCosts& c_;
  std::vector<std::size_t> target_;
  std::vector<std::size_t> pos_;
  std::vector<double> load_;
  std::vector<std::vector<std::size_t>> members_;
};

double max_load_of(const AssignCosts& c, const std::vector<std::size_t>& target) {
  std::vector<double> load(c.queue_count(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) load[target[i]] += c(i, target[i]);
  return load.empty() ? 0.0 : *std::max_element(load.begin(), load.end());
}

// Longest-first greedy: each location goes where the resulting load is smallest.
std::vector<std::size_t> greedy_assignment(const AssignCosts& c) {
  const std::size_t l = c.location_count();
  std::vector<double> min_cost(l, kInf);
  for (std::size_t i = 0; i < l; ++i)
    for (const auto j : c.options(i)) min_cost[i] = std::min(min_cost[i], c(i, j));
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return min_cost[a] > min_cost[b]; });
  std::vector<double> load(c.queue_count(), 0.0);
  std::vector<std::size_t> target(l);
  for (const auto i : order) {
    std::size_t best = c.options(i).front();
    for (const auto j : c.options(i)) {
      const double a = load[j] + c(i, j);
      const double b = load[best] + c(i, best);
      if (a < b || (a == b && c(i, j) < c(i, best))) best = j;
    }
    target[i] = best;
    load[best] += c(i, best);
  }
  return target;
}

struct LagrangianResult {
  double bound = 0.0;
  std::vector<double> weights;
  std::vector<std::size_t> best_primal;
  double best_primal_value = kInf;
};

// max over the simplex of sum_i min_j mu_j c_ij, by exponentiated supergradient
// ascent.  Every iterate is a valid lower bound on the min-max load.
LagrangianResult lagrangian_bound(const AssignCosts& c, std::size_t iterations) {
  const std::size_t l = c.location_count();
  const std::size_t n = c.queue_count();
  LagrangianResult r;
  std::vector<double> mu(n, 1.0 / static_cast<double>(n));
  std::vector<double> s(n);
  std::vector<std::size_t> pick(l);
  r.weights = mu;
  for (std::size_t it = 0; it <= iterations; ++it) {
    std::fill(s.begin(), s.end(), 0.0);
    double g = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
      std::size_t best = c.options(i).front();
      double bv = mu[best] * c(i, best);
      for (const auto j : c.options(i)) {
        const double v = mu[j] * c(i, j);
        if (v < bv) {
          bv = v;
          best = j;
        }
      }
      pick[i] = best;
      s[best] += c(i, best);
      g += bv;
    }
    const double smax = *std::max_element(s.begin(), s.end());
    if (g > r.bound) {
      r.bound = g;
      r.weights = mu;
    }
    if (smax < r.best_primal_value) {
      r.best_primal_value = smax;
      r.best_primal = pick;
    }
    if (it == iterations || !(smax > 0.0)) break;
    const double eta = 2.0 / std::sqrt(static_cast<double>(it) + 1.0);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      mu[j] = std::max(mu[j] * std::exp(eta * (s[j] / smax - 1.0)), 1e-300);
      total += mu[j];
    }
    for (auto& m : mu) m /= total;
  }
  return r;
}

struct Node {
  double bound;
  std::size_t depth;
  std::size_t parent;
  std::size_t choice;
};

}  // namespace

MinMaxLoadResult solve_minmax_load(const AssignCosts& costs, const MinMaxLoadOptions& options,
                                   std::span<const Association> warm_starts) {
  const std::size_t l = costs.location_count();
  const std::size_t n = costs.queue_count();
  for (std::size_t i = 0; i < l; ++i) {
    if (costs.options(i).empty()) {
      throw CoverageError(i, "location " + std::to_string(i) + " has no queue that can serve it");
    }
  }
  MinMaxLoadResult res;
  if (l == 0) {
    res.optimal = true;
    return res;
  }

  // Lower bounds: Lagrangian and the cheapest placement of each location.
  const auto lag = lagrangian_bound(costs, options.lagrangian_iterations);
  double lower = lag.bound;
  std::vector<double> min_cost(l, kInf);
  std::vector<double> weighted_min(l, kInf);
  for (std::size_t i = 0; i < l; ++i) {
    for (const auto j : costs.options(i)) {
      min_cost[i] = std::min(min_cost[i], costs(i, j));
      weighted_min[i] = std::min(weighted_min[i], lag.weights[j] * costs(i, j));
    }
    lower = std::max(lower, min_cost[i]);
  }

  // Incumbent from greedy, the Lagrangian's best primal and any warm starts.
  std::vector<std::vector<std::size_t>> seeds{greedy_assignment(costs), lag.best_primal};
  for (const auto& w : warm_starts) {
    if (w.target.size() != l) throw std::invalid_argument("warm start has the wrong size");
    bool ok = true;
    for (std::size_t i = 0; i < l && ok; ++i) ok = w.target[i] < n && costs(i, w.target[i]) < kInf;
    if (ok) seeds.push_back(w.target);
  }
  double upper = kInf;
  for (const auto& s : seeds) {
    LoadState st(costs, s);
    st.improve();
    const double v = st.max_load();
    if (v < upper) {
      upper = v;
      res.association.target = st.target();
    }
  }
  auto closed = [&](double lb) { return lb >= upper * (1.0 - options.relative_gap); };

  if (!closed(lower) && options.max_nodes > 0) {
    // Best-first branch and bound over locations with positive cost, fewest
    // options first.  Zero-cost locations stay wherever the incumbent put them.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < l; ++i)
      if (min_cost[i] > 0.0 || costs.options(i).size() == 1) order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (costs.options(a).size() != costs.options(b).size())
        return costs.options(a).size() < costs.options(b).size();
      return min_cost[a] > min_cost[b];
    });
    const std::size_t depth_max = order.size();
    std::vector<double> suffix_weighted(depth_max + 1, 0.0);
    std::vector<double> suffix_min(depth_max + 1, 0.0);
    for (std::size_t d = depth_max; d-- > 0;) {
      suffix_weighted[d] = suffix_weighted[d + 1] + weighted_min[order[d]];
      suffix_min[d] = std::max(suffix_min[d + 1], min_cost[order[d]]);
    }

    std::vector<Node> nodes;
    std::vector<double> arena;  // loads per node
    auto cmp = [&](std::size_t a, std::size_t b) {
      if (nodes[a].bound != nodes[b].bound) return nodes[a].bound > nodes[b].bound;
      if (nodes[a].depth != nodes[b].depth) return nodes[a].depth < nodes[b].depth;
      return a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> open(cmp);
    nodes.push_back({lower, 0, 0, 0});
    arena.assign(n, 0.0);
    open.push(0);
    std::vector<double> child(n);
    bool exhausted = true;

    while (!open.empty()) {
      const std::size_t id = open.top();
      if (closed(nodes[id].bound)) break;
      if (nodes.size() >= options.max_nodes) {
        exhausted = false;
        break;
      }
      open.pop();
      const Node node = nodes[id];
      const std::size_t i = order[node.depth];
      for (const auto j : costs.options(i)) {
        std::copy(arena.begin() + static_cast<std::ptrdiff_t>(id * n),
                  arena.begin() + static_cast<std::ptrdiff_t>((id + 1) * n), child.begin());
        child[j] += costs(i, j);
        double mx = 0.0, weighted = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
          mx = std::max(mx, child[q]);
          weighted += lag.weights[q] * child[q];
        }
        const std::size_t d = node.depth + 1;
        double bound = std::max({mx, weighted + suffix_weighted[d], suffix_min[d], node.bound});
        if (d < depth_max) {
          // One-step lookahead on the next location.
          const std::size_t nx = order[d];
          double best = kInf;
          for (const auto q : costs.options(nx)) best = std::min(best, child[q] + costs(nx, q));
          bound = std::max(bound, best);
        }
        if (closed(bound)) continue;
        if (d == depth_max) {
          // Leaf: rebuild the assignment along the parent chain.
          upper = mx;
          auto& t = res.association.target;
          t[order[node.depth]] = j;
          for (std::size_t p = id; p != 0; p = nodes[p].parent) t[order[nodes[p].depth - 1]] = nodes[p].choice;
          continue;
        }
        nodes.push_back({bound, d, id, j});
        arena.insert(arena.end(), child.begin(), child.end());
        open.push(nodes.size() - 1);
      }
    }
    res.nodes = nodes.size();
    if (exhausted) {
      lower = upper;
    } else if (!open.empty()) {
      lower = std::max(lower, std::min(nodes[open.top()].bound, upper));
    }
  }

  res.value = max_load_of(costs, res.association.target);
  res.lower_bound = std::min(lower, res.value);
  res.optimal = closed(lower);
  return res;
}

OptResult lambda_max_optimal(const ServiceModel& model, double rho_bar, const MinMaxLoadOptions& options,
                             std::span<const Association> warm_starts) {
  const auto start = std::chrono::steady_clock::now();
  const auto costs = AssignCosts::from_model(model);
  const auto mm = solve_minmax_load(costs, options, warm_starts);
  OptResult r;
  r.kind = MetricKind::lambda_max;
  r.value = mm.value > 0.0 ? rho_bar / mm.value : kInf;
  r.bound = mm.lower_bound > 0.0 ? rho_bar / mm.lower_bound : kInf;
  r.gap = r.bound - r.value;
  r.association = mm.association;
  r.certificate = mm.optimal ? Certificate::optimal : Certificate::within_gap;
  r.iterations = mm.nodes;
  if (mm.value > 0.0) {
    // The cap binds at the returned rate: the busiest queue sits exactly at rho_bar.
    const double busiest = loads(mm.association, model, r.value).max();
    if (std::abs(busiest - rho_bar) > 1e-9 * rho_bar) {
      throw std::logic_error("load cap not tight at the optimal arrival rate");
    }
  }
  r.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace hetnet
