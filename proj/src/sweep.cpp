#include "hetnet/sweep.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "hetnet/errors.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/queueing.hpp"

namespace hetnet {

Instance make_instance(const Scenario& scenario, const RaScheme& ra, const McsTable& mcs) {
  Instance inst;
  inst.ra = ra;
  inst.link = build_link_table(scenario, ra, mcs);
  inst.model = ServiceModel::from_link(inst.link, scenario.traffic, scenario.config.mean_file_size);
  return inst;
}

Scenario without_small_cells(const Scenario& scenario) {
  // Macros come first in the layout, so the bare realisation is the macro
  // column block of the same gain table: shadowing is shared with the original.
  Scenario out = scenario;
  out.config.small_cells_per_macro = 0;
  const std::size_t macros = scenario.layout.macro_count();
  for (std::size_t b = 0; b < macros; ++b)
    if (scenario.layout.base_stations[b].kind != BsKind::macro) throw std::logic_error("macros must precede small cells");
  out.layout.base_stations.resize(macros);
  const GainTable& g = scenario.gains;
  GainTable& h = out.gains;
  h.bs_count = macros;
  for (auto* v : {&h.distance_m, &h.path_loss_db, &h.gain_db, &h.gain_lin}) v->clear();
  for (std::size_t i = 0; i < g.location_count; ++i) {
    const std::size_t row = i * g.bs_count;
    h.distance_m.insert(h.distance_m.end(), g.distance_m.begin() + row, g.distance_m.begin() + row + macros);
    h.path_loss_db.insert(h.path_loss_db.end(), g.path_loss_db.begin() + row, g.path_loss_db.begin() + row + macros);
    h.gain_db.insert(h.gain_db.end(), g.gain_db.begin() + row, g.gain_db.begin() + row + macros);
    h.gain_lin.insert(h.gain_lin.end(), g.gain_lin.begin() + row, g.gain_lin.begin() + row + macros);
  }
  return out;
}

std::uint64_t realization_seed(std::uint64_t base, std::size_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string rule_label(const RuleChoice& r) { return std::string(to_string(r.rule)); }

Association apply_rule(const RuleChoice& r, const Scenario& scenario, const Instance& inst) {
  switch (r.rule) {
    case UaRule::best_sinr:
      return best_sinr(inst.link);
    case UaRule::range_extension:
      return range_extension(scenario, inst.link);
    case UaRule::small_cell_first:
      return small_cell_first(inst.link, r.beta_db.value_or(kBetaMinusInfinity));
  }
  throw std::logic_error("unknown rule");
}

std::vector<RuleChoice> default_rules(const McsTable& mcs) {
  std::vector<RuleChoice> out{{UaRule::best_sinr, std::nullopt}, {UaRule::range_extension, std::nullopt}};
  for (const double b : mcs.thresholds_db) out.push_back({UaRule::small_cell_first, b});
  return out;
}

namespace {

std::string error_marker(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const InfeasibleError&) {
    return "infeasible";
  } catch (const BudgetExceeded&) {
    return "budget-exceeded";
  } catch (const UnstableError&) {
    return "unstable";
  } catch (const CoverageError&) {
    return "uncovered";
  } catch (const std::exception&) {
    return "error";
  }
}

double zero_load_work(const ServiceModel& m) {
  double w = 0.0;
  for (std::size_t i = 0; i < m.location_count(); ++i) {
    double best = kInf;
    for (const auto j : m.options(i)) best = std::min(best, m.service_time(i, j));
    if (m.alpha(i) > 0.0) w += m.alpha(i) * best;
  }
  return w;
}

struct Task {
  std::size_t realization;
  std::optional<RaKind> scheme;  // nullopt: no-small-cell baseline
};

class CellRunner {
 public:
  CellRunner(const SweepSpec& spec, const Scenario& scenario, std::size_t realization)
      : spec_(spec), scenario_(scenario), realization_(realization) {}

  void run_scheme(RaKind kind, std::vector<SweepRow>& out) {
    std::vector<std::optional<std::size_t>> ks;
    if (kind == RaKind::ccd) {
      ks.push_back(std::nullopt);
    } else {
      for (const auto k : spec_.k_values) ks.push_back(k);
    }
    for (const auto& k : ks) {
      const RaScheme ra = kind == RaKind::ccd ? RaScheme::ccd()
                          : kind == RaKind::od ? RaScheme::od(*k)
                                               : RaScheme::psd(*k);
      run_cell(ra, std::string(to_string(kind)), out, true);
    }
  }

  void run_baseline(std::vector<SweepRow>& out) { run_cell(RaScheme::ccd(), "baseline", out, false); }

 private:
  SweepRow row(const std::string& ra, const RaScheme& scheme) const {
    SweepRow r;
    r.realization = realization_;
    r.seed = scenario_.config.seed;
    r.ra = ra;
    r.k = scheme.k;
    return r;
  }

  void run_cell(const RaScheme& ra, const std::string& label, std::vector<SweepRow>& out, bool with_rules) {
    Instance inst;
    try {
      inst = make_instance(scenario_, ra);
    } catch (...) {
      SweepRow r = row(label, ra);
      r.rule = "optimal";
      r.metric = std::string(to_string(spec_.metric));
      r.ok = false;
      r.certificate = error_marker(std::current_exception());
      out.push_back(r);
      return;
    }
    const double rho_bar = scenario_.config.rho_bar;

    std::vector<std::pair<const RuleChoice*, Association>> assocs;
    std::vector<Association> hints;
    std::vector<std::pair<const RuleChoice*, std::string>> rule_errors;
    if (with_rules) {
      for (const auto& rc : spec_.rules) {
        try {
          assocs.emplace_back(&rc, apply_rule(rc, scenario_, inst));
          if (spec_.warm_start) hints.push_back(assocs.back().second);
        } catch (...) {
          rule_errors.emplace_back(&rc, error_marker(std::current_exception()));
        }
      }
    }
    if (spec_.warm_start && previous_ && previous_label_ == label) hints.push_back(*previous_);

    auto rule_row = [&](const RuleChoice& rc, std::optional<double> lambda, std::string_view metric) {
      SweepRow r = row(label, ra);
      r.rule = rule_label(rc);
      r.beta = rc.beta_db;
      r.lambda = lambda;
      r.metric = std::string(metric);
      r.certificate = "exact";
      return r;
    };
    auto fail_rows = [&](std::optional<double> lambda, std::string_view metric) {
      for (const auto& [rc, marker] : rule_errors) {
        SweepRow r = rule_row(*rc, lambda, metric);
        r.ok = false;
        r.certificate = marker;
        out.push_back(r);
      }
    };
    auto opt_row = [&](std::optional<double> lambda, std::string_view metric, auto&& solve) {
      SweepRow r = row(label, ra);
      r.rule = "optimal";
      r.lambda = lambda;
      r.metric = std::string(metric);
      try {
        const OptResult res = solve();
        r.value = res.value;
        r.bound = res.bound;
        r.certificate = std::string(to_string(res.certificate));
        r.iterations = res.iterations;
        if (res.association) {
          previous_ = *res.association;
          previous_label_ = label;
        }
      } catch (...) {
        r.ok = false;
        r.certificate = error_marker(std::current_exception());
      }
      out.push_back(r);
    };

    if (spec_.metric == MetricKind::lambda_max) {
      for (const auto& [rc, a] : assocs) {
        SweepRow r = rule_row(*rc, std::nullopt, "lambda_max");
        r.value = lambda_max_of_rule(a, inst.model, rho_bar);
        out.push_back(r);
      }
      fail_rows(std::nullopt, "lambda_max");
      if (spec_.optimal || !with_rules) {
        opt_row(std::nullopt, "lambda_max",
                [&] { return lambda_max_optimal(inst.model, rho_bar, spec_.load_options, hints); });
      }
      return;
    }

    const bool max_metric = spec_.metric == MetricKind::minmax_delay;
    const std::string_view rule_metric = max_metric ? "max_delay" : "avg_delay";
    for (const double lambda : spec_.lambdas) {
      for (const auto& [rc, a] : assocs) {
        SweepRow r = rule_row(*rc, lambda, rule_metric);
        try {
          const DelayReport d = delays(a, inst.model, lambda, rho_bar);
          r.value = max_metric ? d.t_max : d.t_system;
          if (d.above_cap) r.certificate = "above-cap";
        } catch (...) {
          r.ok = false;
          r.certificate = error_marker(std::current_exception());
        }
        out.push_back(r);
      }
      fail_rows(lambda, rule_metric);
      if (!spec_.optimal) continue;
      if (max_metric) {
        opt_row(lambda, "max_delay", [&] {
          return minmax_delay(lambda, inst.model, rho_bar, spec_.epsilon, spec_.delay_options, hints);
        });
      } else {
        opt_row(lambda, "avg_delay_lb", [&] {
          const double tol = spec_.tol * lambda * zero_load_work(inst.model);
          return avgdelay_lower_bound(lambda, inst.model, rho_bar, tol, spec_.relaxation_options, hints);
        });
      }
    }
  }

  const SweepSpec& spec_;
  const Scenario& scenario_;
  std::size_t realization_;
  std::optional<Association> previous_;
  std::string previous_label_;
};

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepSpec& spec_in) {
  base.validate();
  SweepSpec spec = spec_in;
  const std::size_t m = base.total_subchannels_per_macro;
  if (spec.k_values.empty()) {
    for (std::size_t k = 1; k < m; ++k) spec.k_values.push_back(k);
  }
  for (const auto k : spec.k_values) {
    if (k < 1 || k >= m) throw ConfigError("K values must lie in [1, M-1]");
  }
  if (spec.metric != MetricKind::lambda_max && spec.lambdas.empty())
    throw ConfigError("delay metrics need a lambda grid");
  for (const double l : spec.lambdas)
    if (!(l > 0.0)) throw ConfigError("lambda values must be positive");

  if (!spec.seeds.empty()) spec.realizations = spec.seeds.size();
  std::vector<Scenario> scenarios(spec.realizations);
  parallel_for(spec.realizations, spec.workers, [&](std::size_t r) {
    ScenarioConfig cfg = base;
    cfg.seed = spec.seeds.empty() ? realization_seed(spec.seed, r) : spec.seeds[r];
    scenarios[r] = make_scenario(cfg);
  });

  std::vector<Task> tasks;
  const bool baseline = spec.baseline && spec.metric == MetricKind::lambda_max && base.small_cells_per_macro > 0;
  for (std::size_t r = 0; r < spec.realizations; ++r) {
    if (baseline) tasks.push_back({r, std::nullopt});
    for (const auto s : spec.schemes) tasks.push_back({r, s});
  }
  std::vector<std::vector<SweepRow>> results(tasks.size());
  parallel_for(tasks.size(), spec.workers, [&](std::size_t t) {
    const Task& task = tasks[t];
    CellRunner runner(spec, scenarios[task.realization], task.realization);
    if (task.scheme) {
      runner.run_scheme(*task.scheme, results[t]);
    } else {
      const Scenario bare = without_small_cells(scenarios[task.realization]);
      CellRunner(spec, bare, task.realization).run_baseline(results[t]);
    }
  });
  std::vector<SweepRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

namespace {

using PointKey = std::tuple<std::string, std::optional<std::size_t>, std::string, std::optional<double>,
                            std::optional<double>, std::string>;

}  // namespace

std::vector<CurvePoint> aggregate(const std::vector<SweepRow>& rows, std::size_t realizations) {
  std::map<PointKey, std::size_t> index;
  std::vector<CurvePoint> out;
  std::vector<double> sums;
  for (const auto& r : rows) {
    const PointKey key{r.ra, r.k, r.rule, r.beta, r.lambda, r.metric};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      out.push_back({r.ra, r.k, r.rule, r.beta, r.lambda, r.metric, 0.0, 0, 0});
      sums.push_back(0.0);
    }
    CurvePoint& p = out[it->second];
    if (r.ok) {
      sums[it->second] += r.value;
      ++p.samples;
    } else {
      ++p.failures;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean = out[i].samples > 0 ? sums[i] / static_cast<double>(out[i].samples) : 0.0;
    if (out[i].samples + out[i].failures < realizations) out[i].failures += realizations - out[i].samples - out[i].failures;
  }
  return out;
}

std::vector<CurvePoint> best_over_k(const std::vector<CurvePoint>& points) {
  using Key = std::tuple<std::string, std::string, std::optional<double>, std::string>;
  std::map<Key, std::size_t> index;
  std::vector<CurvePoint> out;
  for (const auto& p : points) {
    if (p.failures > 0 || p.samples == 0) continue;
    const bool maximize = p.metric == "lambda_max";
    const Key key{p.ra, p.rule, p.lambda, p.metric};
    auto [it, inserted] = index.try_emplace(key, out.size());
    if (inserted) {
      out.push_back(p);
      continue;
    }
    CurvePoint& best = out[it->second];
    if (maximize ? p.mean > best.mean : p.mean < best.mean) best = p;
  }
  return out;
}

}  // namespace hetnet
