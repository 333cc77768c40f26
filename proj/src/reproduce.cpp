#include "hetnet/reproduce.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "hetnet/errors.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {

namespace {

constexpr const char* kToolVersion = "1.0.0";

SweepSpec base_spec(const RunConfig& c, std::size_t k_step) {
  SweepSpec s;
  s.realizations = c.experiment.realizations;
  s.seed = c.scenario.seed;
  s.workers = c.experiment.workers == 0 ? default_workers() : c.experiment.workers;
  s.rules = default_rules();
  for (std::size_t k = k_step; k < c.scenario.total_subchannels_per_macro; k += k_step) s.k_values.push_back(k);
  s.epsilon = c.experiment.epsilon;
  s.tol = c.experiment.relaxation_tol;
  s.load_options.max_nodes = c.experiment.max_nodes;
  s.delay_options.max_nodes = c.experiment.delay_max_nodes;
  s.delay_options.load_options.max_nodes = c.experiment.max_nodes;
  return s;
}

FigureOutput lambda_max_figure(const RunConfig& c, int id, TrafficKind traffic) {
  ScenarioConfig sc = c.scenario;
  sc.traffic = TrafficSpec{};
  sc.traffic.kind = traffic;
  SweepSpec s = base_spec(c, c.experiment.k_step);
  // The solver never sees the rule associations, so rule dominance is a
  // real check rather than a consequence of warm starting.
  s.warm_start = false;
  FigureOutput f;
  f.id = id;
  f.file = "fig" + std::to_string(id) + ".csv";
  f.rows = run_sweep(sc, s);
  f.best = best_over_k(aggregate(f.rows, s.realizations));
  return f;
}

/// lambda grid: factors times the mean Best-SINR lambda_max under PSD at its best K.
std::vector<double> delay_lambdas(const RunConfig& c) {
  SweepSpec s = base_spec(c, c.experiment.delay_k_step);
  s.schemes = {RaKind::psd};
  s.rules = {{UaRule::best_sinr, std::nullopt}};
  s.optimal = false;
  s.baseline = false;
  const auto best = best_over_k(aggregate(run_sweep(c.scenario, s), s.realizations));
  if (best.empty()) throw InfeasibleError("Best SINR has no stable K under PSD");
  std::vector<double> out;
  for (const double f : c.experiment.lambda_factors) out.push_back(f * best.front().mean);
  return out;
}

FigureOutput delay_figure(const RunConfig& c, int id, MetricKind metric, const std::vector<double>& lambdas) {
  SweepSpec s = base_spec(c, c.experiment.delay_k_step);
  s.metric = metric;
  s.schemes = {RaKind::psd};
  s.lambdas = lambdas;
  s.baseline = false;
  FigureOutput f;
  f.id = id;
  f.file = "fig" + std::to_string(id) + ".csv";
  f.rows = run_sweep(c.scenario, s);
  f.best = best_over_k(aggregate(f.rows, s.realizations));
  return f;
}

const CurvePoint* find_best(const std::vector<CurvePoint>& best, std::string_view ra, std::string_view rule,
                            std::optional<double> lambda = std::nullopt) {
  for (const auto& p : best)
    if (p.ra == ra && p.rule == rule && p.lambda == lambda) return &p;
  return nullptr;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void scheme_order(const FigureOutput& f, std::vector<TrendCheck>& out) {
  const std::string tag = "fig" + std::to_string(f.id);
  const auto* psd = find_best(f.best, "psd", "optimal");
  const auto* od = find_best(f.best, "od", "optimal");
  const auto* ccd = find_best(f.best, "ccd", "optimal");
  const auto* bare = find_best(f.best, "baseline", "optimal");
  if (psd && od && ccd) {
    out.push_back({tag + ": optimal lambda_max PSD >= OD >= CCD, PSD > CCD",
                   psd->mean >= od->mean && od->mean >= ccd->mean && psd->mean > ccd->mean,
                   "psd=" + fmt(psd->mean) + " od=" + fmt(od->mean) + " ccd=" + fmt(ccd->mean)});
  }
  if (psd && bare) {
    const double best = std::max({psd->mean, od ? od->mean : 0.0, ccd ? ccd->mean : 0.0});
    const double gain = best / bare->mean - 1.0;
    out.push_back({tag + ": gain over no small cells > 50%", gain > 0.5, "gain=" + fmt(100.0 * gain) + "%"});
  }
  // Every rule at or below the optimum in every (realisation, scheme, K) cell.
  std::map<std::tuple<std::size_t, std::string, std::optional<std::size_t>>, double> opt;
  for (const auto& r : f.rows)
    if (r.rule == "optimal" && r.ok) opt[{r.realization, r.ra, r.k}] = r.value;
  std::size_t cells = 0, violations = 0;
  for (const auto& r : f.rows) {
    if (r.rule == "optimal" || !r.ok) continue;
    const auto it = opt.find({r.realization, r.ra, r.k});
    if (it == opt.end()) continue;
    ++cells;
    if (r.value > it->second) ++violations;
  }
  out.push_back({tag + ": every rule lambda_max <= optimal at every K", violations == 0 && cells > 0,
                 std::to_string(violations) + " violations in " + std::to_string(cells) + " cells"});
}

}  // namespace

std::vector<TrendCheck> check_trends(const ReproduceResult& result, const ExperimentConfig& experiment) {
  std::vector<TrendCheck> out;
  for (const auto& f : result.figures) {
    if (f.id == 2 || f.id == 3) scheme_order(f, out);
    if (f.id == 4) {
      for (const double l : result.lambdas) {
        const auto* opt = find_best(f.best, "psd", "optimal", l);
        double best_rule = kInf;
        for (const auto& p : f.best)
          if (p.rule != "optimal" && p.lambda == l) best_rule = std::min(best_rule, p.mean);
        if (!opt) continue;
        // The optimum is bracketed to within epsilon per realisation.
        out.push_back({"fig4: optimal max delay <= best rule at lambda=" + fmt(l),
                       opt->mean <= best_rule + experiment.epsilon,
                       "optimal=" + fmt(opt->mean) + " best_rule=" + fmt(best_rule)});
      }
    }
    if (f.id == 6) {
      for (const double l : result.lambdas) {
        const auto* lb = find_best(f.best, "psd", "optimal", l);
        const auto* bs = find_best(f.best, "psd", "best-sinr", l);
        if (!lb || !bs) {
          out.push_back({"fig6: Best SINR within 15% of the lower bound at lambda=" + fmt(l), false, "missing curve"});
          continue;
        }
        const double ratio = bs->mean / lb->mean;
        out.push_back({"fig6: Best SINR within 15% of the lower bound at lambda=" + fmt(l), ratio <= 1.15,
                       "best_sinr=" + fmt(bs->mean) + " (K=" + std::to_string(bs->k.value_or(0)) + ") bound=" +
                           fmt(lb->mean) + " (K=" + std::to_string(lb->k.value_or(0)) + ") ratio=" + fmt(ratio)});
      }
    }
  }
  return out;
}

ReproduceResult reproduce(const RunConfig& config, const std::set<int>& figures) {
  config.scenario.validate();
  config.experiment.validate();
  for (const int f : figures)
    if (!kAllFigures.count(f)) throw ConfigError("unknown figure " + std::to_string(f));
  ReproduceResult out;
  for (std::size_t r = 0; r < config.experiment.realizations; ++r)
    out.seeds.push_back(realization_seed(config.scenario.seed, r));
  if (figures.count(2)) out.figures.push_back(lambda_max_figure(config, 2, TrafficKind::homogeneous));
  if (figures.count(3)) {
    if (config.scenario.small_cells_per_macro == 0) throw ConfigError("figure 3 needs small cells for the hot spots");
    out.figures.push_back(lambda_max_figure(config, 3, TrafficKind::hotspot));
  }
  if (figures.count(4) || figures.count(6)) out.lambdas = delay_lambdas(config);
  if (figures.count(4)) out.figures.push_back(delay_figure(config, 4, MetricKind::minmax_delay, out.lambdas));
  if (figures.count(6)) out.figures.push_back(delay_figure(config, 6, MetricKind::avgdelay_lb, out.lambdas));
  out.trends = check_trends(out, config.experiment);
  return out;
}

void write_reproduction(const ReproduceResult& result, const RunConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& f : result.figures) {
    {
      auto out = open(f.file);
      write_sweep_csv(out, f.rows);
    }
    const std::string best = "fig" + std::to_string(f.id) + "_best.csv";
    {
      auto out = open(best);
      write_curve_csv(out, f.best);
    }
    const auto failed = std::count_if(f.rows.begin(), f.rows.end(), [](const SweepRow& r) { return !r.ok; });
    tasks.push_back({{"figure", f.id},
                     {"status", failed == 0 ? "ok" : "partial"},
                     {"failed_cells", failed},
                     {"outputs", {f.file, best}}});
  }
  {
    auto out = open("trends.csv");
    CsvWriter w(out);
    w.row({"check", "result", "detail"});
    for (const auto& t : result.trends) w.row({t.name, t.pass ? "pass" : "fail", t.detail});
  }
  nlohmann::json manifest = {{"tool", "hetnet"},
                             {"version", kToolVersion},
                             {"config_hash", config_hash(config)},
                             {"config", to_json(config)},
                             {"seeds", result.seeds},
                             {"lambda_grid", result.lambdas},
                             {"tasks", tasks},
                             {"trends", "trends.csv"}};
  auto out = open("manifest.json");
  out << manifest.dump(2) << '\n';
}

}  // namespace hetnet
