// Command-line front end: scenario/phy dumps, rule evaluation, optimisation,
// simulation, sweeps and figure reproduction.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include "hetnet/errors.hpp"
#include "hetnet/io.hpp"
#include "hetnet/parallel.hpp"
#include "hetnet/reproduce.hpp"
#include "hetnet/simulator.hpp"
#include "hetnet/sweep.hpp"

namespace {

using namespace hetnet;

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kInfeasible = 3, kBudget = 4 };

struct Common {
  std::string config_path;
  std::string out;
  std::size_t realization = 0;
};

struct InstanceArgs {
  std::string ra = "psd";
  std::optional<std::size_t> k;
  std::string rule = "best-sinr";
  std::optional<double> beta;
};

RunConfig load_config(const Common& c) { return c.config_path.empty() ? RunConfig{} : load_run_config(c.config_path); }

Scenario load_scenario(const Common& c) {
  ScenarioConfig sc = load_config(c).scenario;
  sc.seed = realization_seed(sc.seed, c.realization);
  return make_scenario(sc);
}

RaScheme make_ra(const InstanceArgs& a, const ScenarioConfig& sc) {
  const RaKind kind = parse_ra_kind(a.ra);
  if (kind == RaKind::ccd) {
    if (a.k) throw ConfigError("CCD takes no --k");
    return RaScheme::ccd();
  }
  if (!a.k) throw ConfigError("--k is required for " + a.ra);
  RaScheme ra = kind == RaKind::od ? RaScheme::od(*a.k) : RaScheme::psd(*a.k);
  ra.validate(sc.total_subchannels_per_macro);
  return ra;
}

RuleChoice make_rule(const InstanceArgs& a) {
  const UaRule rule = parse_ua_rule(a.rule);
  if (rule == UaRule::small_cell_first && !a.beta) throw ConfigError("--beta is required for scf");
  if (rule != UaRule::small_cell_first && a.beta) throw ConfigError("--beta applies to scf only");
  return {rule, a.beta};
}

/// Output stream: the --out file, or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot write " + path);
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "JSON run configuration");
  app->add_option("--out", c.out, "output file (default: stdout)");
  app->add_option("--realization", c.realization, "realisation index (seed derived from the config seed)");
}

void add_instance(CLI::App* app, InstanceArgs& a, bool with_rule) {
  app->add_option("--ra", a.ra, "ccd | od | psd");
  app->add_option("--k", a.k, "sub-channels for the small-cell tier (OD) or the shared band (PSD)");
  if (with_rule) {
    app->add_option("--rule", a.rule, "best-sinr | re | scf");
    app->add_option("--beta", a.beta, "SCF threshold in dB");
  }
}

int cmd_scenario(const Common& c) {
  const Scenario s = load_scenario(c);
  Output out(c.out);
  CsvWriter w(out.get());
  w.row({"loc_id", "bs_id", "distance_m", "gain_db"});
  for (std::size_t i = 0; i < s.gains.location_count; ++i)
    for (std::size_t b = 0; b < s.gains.bs_count; ++b)
      w.row({std::to_string(i), std::to_string(b), format_double(s.gains.distance(i, b)),
             format_double(s.gains.at_db(i, b))});
  return kOk;
}

int cmd_phy(const Common& c, const InstanceArgs& a) {
  const Scenario s = load_scenario(c);
  const LinkTable link = build_link_table(s, make_ra(a, s.config));
  Output out(c.out);
  CsvWriter w(out.get());
  w.row({"loc_id", "vbs_id", "band", "sinr_db", "rate_bps"});
  for (std::size_t i = 0; i < link.location_count; ++i)
    for (std::size_t v = 0; v < link.vbs_count(); ++v)
      w.row({std::to_string(i), std::to_string(v), std::string(to_string(link.virtuals[v].band)),
             format_double(linear_to_db(link.sinr_at(i, v))), format_double(link.rate_at(i, v))});
  return kOk;
}

int cmd_associate(const Common& c, const InstanceArgs& a) {
  const Scenario s = load_scenario(c);
  const Instance inst = make_instance(s, make_ra(a, s.config));
  const Association assoc = apply_rule(make_rule(a), s, inst);
  Output out(c.out);
  CsvWriter w(out.get());
  w.row({"loc_id", "vbs_id"});
  for (std::size_t i = 0; i < assoc.target.size(); ++i) w.row({std::to_string(i), std::to_string(assoc.target[i])});
  return kOk;
}

int cmd_evaluate(const Common& c, const InstanceArgs& a, double lambda) {
  const Scenario s = load_scenario(c);
  const Instance inst = make_instance(s, make_ra(a, s.config));
  const Association assoc = apply_rule(make_rule(a), s, inst);
  const DelayReport d = delays(assoc, inst.model, lambda, s.config.rho_bar);
  if (d.above_cap) std::cerr << "warning: some load factor exceeds rho_bar\n";
  Output out(c.out);
  CsvWriter w(out.get());
  w.row({"record", "id", "value"});
  for (std::size_t j = 0; j < d.rho.size(); ++j) w.row({"rho", std::to_string(j), format_double(d.rho[j])});
  for (std::size_t i = 0; i < d.t_per_class.size(); ++i)
    w.row({"t_i_seconds", std::to_string(i), format_double(d.t_per_class[i])});
  w.row({"t_system", "", format_double(d.t_system)});
  w.row({"t_max", "", format_double(d.t_max)});
  w.row({"lambda_max", "", format_double(lambda_max_of_rule(assoc, inst.model, s.config.rho_bar))});
  return kOk;
}

MetricKind parse_metric(const std::string& m) {
  if (m == "lambda-max") return MetricKind::lambda_max;
  if (m == "max-delay") return MetricKind::minmax_delay;
  if (m == "avg-delay") return MetricKind::avgdelay_lb;
  throw ConfigError("unknown metric " + m + " (lambda-max | max-delay | avg-delay)");
}

int exit_for_rows(const std::vector<SweepRow>& rows) {
  if (rows.empty() || std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; })) return kOk;
  const std::string& m = rows.front().certificate;
  if (m == "infeasible" || m == "unstable") return kInfeasible;
  if (m == "budget-exceeded") return kBudget;
  return kFailure;
}

struct OptimizeArgs {
  std::string metric = "lambda-max";
  bool sweep_k = false;
  std::vector<double> lambdas;
  std::optional<double> epsilon;
  std::optional<double> tol;
  std::optional<std::size_t> realizations;
  std::vector<std::string> schemes;
  std::vector<std::string> rules;
  std::optional<std::size_t> k_step;
  std::string best_out;
};

SweepSpec spec_from(const RunConfig& cfg, const OptimizeArgs& o) {
  SweepSpec s;
  s.metric = parse_metric(o.metric);
  s.seed = cfg.scenario.seed;
  s.workers = cfg.experiment.workers == 0 ? default_workers() : cfg.experiment.workers;
  s.epsilon = o.epsilon.value_or(cfg.experiment.epsilon);
  s.tol = o.tol.value_or(cfg.experiment.relaxation_tol);
  s.load_options.max_nodes = cfg.experiment.max_nodes;
  s.delay_options.max_nodes = cfg.experiment.delay_max_nodes;
  s.delay_options.load_options.max_nodes = cfg.experiment.max_nodes;
  s.lambdas = o.lambdas;
  s.realizations = o.realizations.value_or(1);
  return s;
}

int cmd_optimize(const Common& c, const InstanceArgs& a, const OptimizeArgs& o) {
  const RunConfig cfg = load_config(c);
  SweepSpec s = spec_from(cfg, o);
  s.schemes = {parse_ra_kind(a.ra)};
  s.baseline = false;
  if (s.schemes.front() != RaKind::ccd) {
    if (o.sweep_k == a.k.has_value()) throw ConfigError("give exactly one of --k and --sweep-k");
    if (a.k) s.k_values = {*a.k};
  } else if (a.k || o.sweep_k) {
    throw ConfigError("CCD takes neither --k nor --sweep-k");
  }
  if (!o.realizations) s.seeds = {realization_seed(cfg.scenario.seed, c.realization)};
  const auto rows = run_sweep(cfg.scenario, s);
  Output out(c.out);
  write_sweep_csv(out.get(), rows);
  return exit_for_rows(rows);
}

int cmd_sweep(const Common& c, const OptimizeArgs& o) {
  const RunConfig cfg = load_config(c);
  SweepSpec s = spec_from(cfg, o);
  s.realizations = o.realizations.value_or(cfg.experiment.realizations);
  if (!o.schemes.empty()) {
    s.schemes.clear();
    for (const auto& r : o.schemes) s.schemes.push_back(parse_ra_kind(r));
  }
  const std::size_t step = o.k_step.value_or(cfg.experiment.k_step);
  if (step == 0) throw ConfigError("--k-step must be positive");
  for (std::size_t k = step; k < cfg.scenario.total_subchannels_per_macro; k += step) s.k_values.push_back(k);
  if (o.rules.empty()) {
    s.rules = default_rules();
  } else {
    for (const auto& r : o.rules) {
      const UaRule rule = parse_ua_rule(r);
      if (rule == UaRule::small_cell_first) {
        for (const auto& rc : default_rules())
          if (rc.rule == rule) s.rules.push_back(rc);
      } else {
        s.rules.push_back({rule, std::nullopt});
      }
    }
  }
  const auto rows = run_sweep(cfg.scenario, s);
  Output out(c.out);
  write_sweep_csv(out.get(), rows);
  if (!o.best_out.empty()) {
    std::ofstream best(o.best_out, std::ios::binary);
    if (!best) throw ConfigError("cannot write " + o.best_out);
    write_curve_csv(best, best_over_k(aggregate(rows, s.realizations)));
  }
  return exit_for_rows(rows);
}

struct SimArgs {
  double lambda = 0.0;
  double horizon = 2000.0;
  std::optional<double> warmup;
  std::size_t replications = 10;
  std::string law = "exponential";
  std::string trace;
};

int cmd_simulate(const Common& c, const InstanceArgs& a, const SimArgs& sa) {
  const RunConfig cfg = load_config(c);
  ScenarioConfig sc = cfg.scenario;
  sc.seed = realization_seed(sc.seed, c.realization);
  const Scenario s = make_scenario(sc);
  const Instance inst = make_instance(s, make_ra(a, s.config));
  SimSpec spec;
  spec.assoc = apply_rule(make_rule(a), s, inst);
  spec.model = inst.model;
  spec.lambda = sa.lambda;
  if (sa.law == "exponential") {
    spec.law = FileSizeLaw::exponential;
  } else if (sa.law == "deterministic") {
    spec.law = FileSizeLaw::deterministic;
  } else {
    throw ConfigError("--law must be exponential or deterministic");
  }
  spec.horizon_s = sa.horizon;
  spec.warmup_s = sa.warmup;
  spec.seed = sc.seed;
  spec.replications = sa.replications;
  spec.workers = cfg.experiment.workers == 0 ? default_workers() : cfg.experiment.workers;
  std::ofstream trace;
  if (!sa.trace.empty()) {
    if (sa.replications != 1) throw ConfigError("--trace needs --replications 1");
    trace.open(sa.trace, std::ios::binary);
    if (!trace) throw ConfigError("cannot write " + sa.trace);
    trace << "time,queue,event,class,n_after\n";
    spec.trace = &trace;
  }
  const SimReport rep = simulate(spec);
  if (rep.non_stationary) std::cerr << "warning: some queue has load >= 1; the run is not stationary\n";
  std::optional<DelayReport> analytic;
  if (!rep.non_stationary) analytic = delays(spec.assoc, spec.model, spec.lambda);
  const auto little = littles_check(rep);
  Output out(c.out);
  CsvWriter w(out.get());
  w.row({"record", "id", "sim_mean", "ci_half_width", "samples", "analytic", "littles_residual"});
  auto est = [](const Estimate& e) {
    return std::vector<std::string>{e.samples ? format_double(e.mean) : "", e.samples ? format_double(e.half_width) : "",
                                    std::to_string(e.samples)};
  };
  for (std::size_t i = 0; i < rep.per_class.size(); ++i) {
    auto f = est(rep.per_class[i]);
    w.row({"class_sojourn", std::to_string(i), f[0], f[1], f[2],
           analytic ? format_double(analytic->t_per_class[i]) : "", ""});
  }
  for (std::size_t q = 0; q < rep.queues.size(); ++q) {
    auto f = est(rep.queues[q].number_in_system);
    w.row({"queue_number", std::to_string(q), f[0], f[1], f[2],
           analytic ? format_double(analytic->rho[q] < 1.0 ? analytic->rho[q] / (1.0 - analytic->rho[q]) : kInf)
                    : "",
           format_double(little[q])});
  }
  auto f = est(rep.system);
  w.row({"system_sojourn", "", f[0], f[1], f[2], analytic ? format_double(analytic->t_system) : "", ""});
  w.row({"max_class_mean", "", format_double(rep.max_class_mean), "", "", analytic ? format_double(analytic->t_max) : "",
         ""});
  w.row({"arrivals", "", std::to_string(rep.arrivals), "", "", "", ""});
  w.row({"departures", "", std::to_string(rep.departures), "", "", "", ""});
  return kOk;
}

struct ReproduceArgs {
  std::vector<int> figures;
  std::optional<std::size_t> realizations;
  std::optional<std::uint64_t> seed;
  std::string dir;
};

int cmd_reproduce(const Common& c, const ReproduceArgs& r) {
  RunConfig cfg = load_config(c);
  if (r.realizations) cfg.experiment.realizations = *r.realizations;
  if (r.seed) cfg.scenario.seed = *r.seed;
  std::set<int> figs(r.figures.begin(), r.figures.end());
  if (figs.empty()) figs = kAllFigures;
  std::string dir = r.dir;
  if (dir.empty()) {
    const char* env = std::getenv("HETNET_OUT_DIR");
    dir = env ? env : "reproduction";
  }
  const ReproduceResult res = reproduce(cfg, figs);
  write_reproduction(res, cfg, dir);
  for (const auto& t : res.trends) std::cout << (t.pass ? "PASS " : "FAIL ") << t.name << " (" << t.detail << ")\n";
  return kOk;
}

void report_error(const char* kind, const std::exception& e) {
  nlohmann::json j = {{"error", kind}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queueing-based planning of heterogeneous cellular networks"};
  app.require_subcommand(1);
  Common common;
  InstanceArgs inst;
  OptimizeArgs opt;
  SimArgs sim;
  ReproduceArgs rep;
  double lambda = 0.0;

  auto* scenario = app.add_subcommand("scenario", "network realisation");
  auto* scenario_dump = scenario->add_subcommand("dump", "layout and gains as CSV");
  scenario->require_subcommand(1);
  add_common(scenario_dump, common);

  auto* phy = app.add_subcommand("phy", "link tables");
  auto* phy_dump = phy->add_subcommand("dump", "SINR and rate per (location, virtual BS)");
  phy->require_subcommand(1);
  add_common(phy_dump, common);
  add_instance(phy_dump, inst, false);

  auto* associate = app.add_subcommand("associate", "apply a user-association rule");
  add_common(associate, common);
  add_instance(associate, inst, true);

  auto* evaluate = app.add_subcommand("evaluate", "loads and delays of a rule");
  add_common(evaluate, common);
  add_instance(evaluate, inst, true);
  evaluate->add_option("--lambda", lambda, "total arrival rate, 1/s")->required();

  auto* optimize = app.add_subcommand("optimize", "optimal association for one metric");
  add_common(optimize, common);
  add_instance(optimize, inst, false);
  optimize->add_option("--metric", opt.metric, "lambda-max | max-delay | avg-delay");
  optimize->add_flag("--sweep-k", opt.sweep_k, "evaluate every K in 1..M-1");
  optimize->add_option("--lambda", opt.lambdas, "arrival rates for the delay metrics");
  optimize->add_option("--epsilon", opt.epsilon, "bisection width, s");
  optimize->add_option("--tol", opt.tol, "relative relaxation tolerance");
  optimize->add_option("--realizations", opt.realizations, "average over this many realisations");

  auto* sweep = app.add_subcommand("sweep", "metric over schemes, K, rules and realisations");
  add_common(sweep, common);
  sweep->add_option("--metric", opt.metric, "lambda-max | max-delay | avg-delay");
  sweep->add_option("--ra", opt.schemes, "schemes (default: ccd od psd)");
  sweep->add_option("--rule", opt.rules, "rules (default: all, SCF over every threshold)");
  sweep->add_option("--k-step", opt.k_step, "K grid step");
  sweep->add_option("--lambda", opt.lambdas, "arrival rates for the delay metrics");
  sweep->add_option("--epsilon", opt.epsilon, "bisection width, s");
  sweep->add_option("--tol", opt.tol, "relative relaxation tolerance");
  sweep->add_option("--realizations", opt.realizations, "number of realisations");
  sweep->add_option("--best-out", opt.best_out, "best-over-K curve CSV");

  auto* simulate = app.add_subcommand("simulate", "processor-sharing simulation of a rule");
  add_common(simulate, common);
  add_instance(simulate, inst, true);
  simulate->add_option("--lambda", sim.lambda, "total arrival rate, 1/s")->required();
  simulate->add_option("--horizon", sim.horizon, "simulated seconds per replication");
  simulate->add_option("--warmup", sim.warmup, "discarded seconds (default 10% of the horizon)");
  simulate->add_option("--replications", sim.replications, "independent replications");
  simulate->add_option("--law", sim.law, "exponential | deterministic");
  simulate->add_option("--trace", sim.trace, "event trace CSV (one replication only)");

  auto* reproduce_cmd = app.add_subcommand("reproduce", "figure-level experiments");
  reproduce_cmd->add_option("--config", common.config_path, "JSON run configuration");
  reproduce_cmd->add_option("--fig", rep.figures, "figures 2, 3, 4, 6 (default: all)");
  reproduce_cmd->add_option("--realizations", rep.realizations, "override the realisation count");
  reproduce_cmd->add_option("--seed", rep.seed, "override the base seed");
  reproduce_cmd->add_option("--out", rep.dir, "output directory (default: $HETNET_OUT_DIR or ./reproduction)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (scenario_dump->parsed()) return cmd_scenario(common);
    if (phy_dump->parsed()) return cmd_phy(common, inst);
    if (associate->parsed()) return cmd_associate(common, inst);
    if (evaluate->parsed()) return cmd_evaluate(common, inst, lambda);
    if (optimize->parsed()) return cmd_optimize(common, inst, opt);
    if (sweep->parsed()) return cmd_sweep(common, opt);
    if (simulate->parsed()) return cmd_simulate(common, inst, sim);
    if (reproduce_cmd->parsed()) return cmd_reproduce(common, rep);
  } catch (const ConfigError& e) {
    report_error("config", e);
    return kConfig;
  } catch (const CoverageError& e) {
    report_error("coverage", e);
    return kConfig;
  } catch (const InfeasibleError& e) {
    report_error("infeasible", e);
    return kInfeasible;
  } catch (const UnstableError& e) {
    report_error("unstable", e);
    return kInfeasible;
  } catch (const BudgetExceeded& e) {
    report_error("budget", e);
    return kBudget;
  } catch (const std::exception& e) {
    report_error("internal", e);
    return kFailure;
  }
  return kFailure;
}
