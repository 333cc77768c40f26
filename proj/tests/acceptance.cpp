// Acceptance checks.  Usage: acceptance [1 2 3 4 5 6 7abc 7d 8]; with no
// arguments every criterion runs.  One PASS/FAIL line per criterion; the exit
// status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hetnet/io.hpp"
#include "hetnet/reproduce.hpp"
#include "hetnet/simulator.hpp"
#include "hetnet/solvers.hpp"
#include "oracles.hpp"

using namespace hetnet;

namespace {

// Tolerances and sizes.
constexpr double kRhoBar = 0.95;
constexpr double kLambdaRelTol = 1e-9;       // 1
constexpr double kDelayEpsilon = 0.02;       // 2, seconds
constexpr double kBoundTolSeconds = 1e-6;    // 3, relaxation tolerance in d2 units
constexpr double kSimRelTol = 0.03;          // 4
constexpr double kLittleTol = 0.02;          // 4
constexpr double kIdentityTol = 1e-10;       // 6, relative
constexpr double kBoundRatio = 1.15;         // 7d
constexpr std::size_t kDeskRealizations = 20;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

/// Tiny instance shared by criteria 2 and 3: L in [3, 8], J in [1, 3], and an
/// arrival rate between 30% and 90% of the optimal lambda_max.
struct Tiny {
  ServiceModel model;
  double lambda = 0.0;
};

std::vector<Tiny> tiny_instances(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Tiny> out;
  while (out.size() < count) {
    const std::size_t l = std::uniform_int_distribution<std::size_t>(3, 8)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    Tiny t{oracle::random_model(rng, l, j), 0.0};
    t.lambda = std::uniform_real_distribution<double>(0.3, 0.9)(rng) * oracle::lambda_max(t.model, kRhoBar);
    out.push_back(std::move(t));
  }
  return out;
}

Outcome criterion1() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  std::size_t n = 0, bad = 0;
  for (; n < 200; ++n) {
    const std::size_t l = std::uniform_int_distribution<std::size_t>(1, 10)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    const auto m = oracle::random_model(rng, l, j);
    const double want = oracle::lambda_max(m, kRhoBar);
    const double got = lambda_max_optimal(m, kRhoBar).value;
    const double err = std::abs(got - want) / want;
    worst = std::max(worst, err);
    if (!(err <= kLambdaRelTol)) ++bad;
  }
  return {bad == 0, std::to_string(n) + " instances, max rel err " + fmt(worst) + " (tol " + fmt(kLambdaRelTol) + ")"};
}

Outcome criterion2() {
  std::size_t bad_value = 0, bad_calls = 0;
  double worst_excess = 0.0;
  const auto inst = tiny_instances(100, 202);
  for (const auto& t : inst) {
    const double opt =
        oracle::min_over(t.model, [&](const auto& a) { return oracle::max_delay(t.model, a, t.lambda, kRhoBar); });
    const auto r = minmax_delay(t.lambda, t.model, kRhoBar, kDelayEpsilon);
    const double excess = r.value - opt;
    worst_excess = std::max(worst_excess, excess);
    if (excess < -1e-12 * opt || excess > kDelayEpsilon) ++bad_value;
    // t0 is the per-class delay of the min-max-load association.
    const auto mm = solve_minmax_load(AssignCosts::from_model(t.model));
    const double t0 = max_class_delay(mm.association, t.model, t.lambda);
    const double budget = t0 > kDelayEpsilon ? std::ceil(std::log2(t0 / kDelayEpsilon)) : 0.0;
    if (static_cast<double>(r.iterations) > budget) ++bad_calls;
  }
  return {bad_value == 0 && bad_calls == 0,
          std::to_string(inst.size()) + " instances, max excess " + fmt(worst_excess) + " s (eps " +
              fmt(kDelayEpsilon) + "), " + std::to_string(bad_value) + " value and " + std::to_string(bad_calls) +
              " call-count violations"};
}

double bound_for(const ServiceModel& m, double lambda) {
  const double tol = kBoundTolSeconds * lambda * m.alpha_sum();
  return avgdelay_lower_bound(lambda, m, kRhoBar, tol).value;
}

Outcome criterion3() {
  std::size_t violations = 0, checked = 0;
  std::vector<double> gaps;
  for (const auto& t : tiny_instances(100, 202)) {
    const double lb = bound_for(t.model, t.lambda);
    double opt = kInf;
    oracle::for_each_assignment(t.model, [&](const std::vector<std::size_t>& a) {
      const double d2 = oracle::avg_delay(t.model, a, t.lambda, kRhoBar);
      if (!std::isfinite(d2)) return;
      ++checked;
      if (lb > d2 * (1 + 1e-12)) ++violations;
      opt = std::min(opt, d2);
    });
    gaps.push_back((opt - lb) / opt);
  }
  std::sort(gaps.begin(), gaps.end());
  const double median = gaps[gaps.size() / 2];

  // Instances with a single queue, or one allowed queue per location, have no
  // integrality gap.
  std::mt19937_64 rng(303);
  double worst_single = 0.0;
  for (int n = 0; n < 50; ++n) {
    const std::size_t l = std::uniform_int_distribution<std::size_t>(1, 8)(rng);
    const std::size_t j = n % 2 == 0 ? 1 : 3;
    const auto m = oracle::random_model(rng, l, j, j == 1 ? 0.0 : 1.0);
    const double lambda = 0.8 * oracle::lambda_max(m, kRhoBar);
    const double exact = oracle::min_over(m, [&](const auto& a) { return oracle::avg_delay(m, a, lambda, kRhoBar); });
    worst_single = std::max(worst_single, std::abs(exact - bound_for(m, lambda)));
  }
  const bool tight = worst_single <= kBoundTolSeconds * (1 + 1e-6);
  return {violations == 0 && tight,
          std::to_string(violations) + " violations over " + std::to_string(checked) +
              " feasible assignments, median gap " + fmt(100.0 * median) + "%, single-option error " +
              fmt(worst_single) + " s (tol " + fmt(kBoundTolSeconds) + ")"};
}

/// Three classes on two queues; lambda scaled so the busier queue sits at rho.
SimSpec multiclass(double rho, FileSizeLaw law) {
  SimSpec s;
  s.model = ServiceModel(2, {0.4, 0.35, 0.25}, {2e6, 1e6, 1e6, 0.0, 5e5, 4e6}, 1e6);
  s.assoc.target = {0, 0, 1};
  s.lambda = rho / loads(s.assoc, s.model, 1.0).max();
  s.law = law;
  s.horizon_s = 50000.0;
  s.replications = 10;
  s.seed = 404;
  return s;
}

Outcome criterion4() {
  std::size_t bad_class = 0, bad_little = 0;
  double worst_rel = 0.0, worst_little = 0.0;
  for (const double rho : {0.3, 0.6, 0.8}) {
    const auto s = multiclass(rho, FileSizeLaw::exponential);
    const auto r = simulate(s);
    const auto d = delays(s.assoc, s.model, s.lambda);
    for (std::size_t i = 0; i < d.t_per_class.size(); ++i) {
      const double want = d.t_per_class[i];
      const double diff = std::abs(r.per_class[i].mean - want);
      worst_rel = std::max(worst_rel, diff / want);
      if (diff > kSimRelTol * want && diff > r.per_class[i].half_width) ++bad_class;
    }
    for (const double x : littles_check(r)) {
      worst_little = std::max(worst_little, x);
      if (!(x < kLittleTol)) ++bad_little;
    }
  }
  return {bad_class == 0 && bad_little == 0,
          "max class deviation " + fmt(100.0 * worst_rel) + "% (tol " + fmt(100.0 * kSimRelTol) +
              "% or CI), max Little residual " + fmt(100.0 * worst_little) + "% (tol " + fmt(100.0 * kLittleTol) +
              "%)"};
}

Outcome criterion5() {
  const auto e = simulate(multiclass(0.6, FileSizeLaw::exponential)).system;
  const auto d = simulate(multiclass(0.6, FileSizeLaw::deterministic)).system;
  return {e.overlaps(d), "exponential " + fmt(e.mean) + " +- " + fmt(e.half_width) + ", deterministic " +
                             fmt(d.mean) + " +- " + fmt(d.half_width)};
}

Outcome criterion6() {
  std::mt19937_64 rng(606);
  double worst = 0.0;
  std::size_t n = 0;
  for (; n < 1000; ++n) {
    const std::size_t l = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
    const std::size_t j = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const auto m = oracle::random_model(rng, l, j);
    Association a;
    for (std::size_t i = 0; i < l; ++i) {
      const auto& opts = m.options(i);
      a.target.push_back(opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)]);
    }
    const double lambda = std::uniform_real_distribution<double>(0.05, 0.95)(rng) / loads(a, m, 1.0).max();
    const auto d = delays(a, m, lambda);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < l; ++i) lhs += lambda * m.alpha(i) * d.t_per_class[i];
    for (const double r : d.rho) rhs += r / (1.0 - r);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  return {worst <= kIdentityTol, std::to_string(n) + " instances, max rel diff " + fmt(worst) + " (tol " +
                                     fmt(kIdentityTol) + ")"};
}

RunConfig desk_config() {
  RunConfig c = load_run_config(std::string(HETNET_SOURCE_DIR) + "/configs/desk.json");
  c.experiment.realizations = kDeskRealizations;
  return c;
}

std::string trend_lines(const std::vector<TrendCheck>& checks) {
  std::string out;
  for (const auto& t : checks) out += "\n    " + std::string(t.pass ? "pass " : "FAIL ") + t.name + " (" + t.detail + ")";
  return out;
}

Outcome criterion7abc() {
  const RunConfig c = desk_config();
  const auto res = reproduce(c, {2});
  bool ok = !res.trends.empty();
  for (const auto& t : res.trends) ok = ok && t.pass;
  return {ok, std::to_string(c.experiment.realizations) + " realizations" + trend_lines(res.trends)};
}

Outcome criterion7d() {
  const RunConfig c = desk_config();
  const auto res = reproduce(c, {6});
  bool ok = !res.trends.empty();
  double worst = 0.0;
  for (const auto& t : res.trends) ok = ok && t.pass;
  for (const auto& f : res.figures) {
    for (const double l : res.lambdas) {
      const CurvePoint *lb = nullptr, *bs = nullptr;
      for (const auto& p : f.best) {
        if (p.lambda != l) continue;
        if (p.rule == "optimal") lb = &p;
        if (p.rule == "best-sinr") bs = &p;
      }
      if (lb && bs) worst = std::max(worst, bs->mean / lb->mean);
    }
  }
  return {ok, "worst Best SINR / bound " + fmt(worst) + " (tol " + fmt(kBoundRatio) + ")" + trend_lines(res.trends)};
}

int run_cli(const std::string& args, const std::string& env) {
  const std::string cmd = env + " " + std::string(HETNET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion8() {
  const auto root = std::filesystem::temp_directory_path() / "hetnet_acceptance_c8";
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  RunConfig c = load_run_config(std::string(HETNET_SOURCE_DIR) + "/configs/desk.json");
  c.experiment.k_step = 10;
  c.experiment.delay_k_step = 20;
  c.experiment.max_nodes = 2000;
  c.experiment.delay_max_nodes = 2000;
  const auto cfg = root / "config.json";
  std::ofstream(cfg) << to_json(c).dump(2);
  const std::string args = "reproduce --config " + cfg.string() + " --fig 2 --fig 3 --fig 4 --fig 6 --realizations 2 --seed 7";
  // Different worker counts must not change a byte.
  if (run_cli(args + " --out " + (root / "a").string(), "HETNET_WORKERS=1") != 0 ||
      run_cli(args + " --out " + (root / "b").string(), "HETNET_WORKERS=3") != 0) {
    return {false, "reproduce exited with an error"};
  }
  std::size_t files = 0, differ = 0;
  for (const auto& e : std::filesystem::directory_iterator(root / "a")) {
    ++files;
    const auto other = root / "b" / e.path().filename();
    if (!std::filesystem::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  std::size_t files_b = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(root / "b")) ++files_b;
  const bool ok = files > 0 && differ == 0 && files == files_b;
  std::filesystem::remove_all(root);
  return {ok, std::to_string(files) + " files compared, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> all{
      {"1", criterion1},       {"2", criterion2},   {"3", criterion3}, {"4", criterion4}, {"5", criterion5},
      {"6", criterion6},       {"7abc", criterion7abc}, {"7d", criterion7d}, {"8", criterion8}};
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  for (const auto& [id, fn] : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " [" << fmt(secs, 3) << " s] "
              << o.detail << std::endl;
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
