#include "hetnet/simulator.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>

#include "hetnet/errors.hpp"
#include "hetnet/parallel.hpp"

namespace hetnet {

void SimSpec::validate() const {
  if (!(horizon_s > 0.0)) throw ConfigError("simulation horizon must be positive");
  const double w = warmup();
  if (!(w >= 0.0) || !(w < horizon_s)) throw ConfigError("warmup must lie in [0, horizon)");
  if (replications < 1) throw ConfigError("at least one replication is required");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (assoc.target.size() != model.location_count()) throw ConfigError("association size mismatch");
  for (std::size_t i = 0; i < assoc.target.size(); ++i) {
    if (assoc.target[i] >= model.queue_count() || !model.allowed(i, assoc.target[i]))
      throw CoverageError(i, "location " + std::to_string(i) + " targets a queue with zero rate");
  }
}

Estimate estimate(const std::vector<double>& samples) {
  Estimate e;
  e.samples = samples.size();
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() < 2) {
    e.half_width = kInf;
    return e;
  }
  double ss = 0.0;
  for (const double s : samples) ss += (s - e.mean) * (s - e.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  e.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  return e;
}

namespace {

struct ClassTally {
  double sojourn_sum = 0.0;
  std::uint64_t count = 0;
};

struct QueueRun {
  double area = 0.0;  // integral of n(t) over the window
  double sojourn_sum = 0.0;
  std::uint64_t tagged = 0;
  std::uint64_t arrivals = 0;
  std::uint64_t departures = 0;
};

struct Job {
  double finish_tag;
  double arrival;
  std::size_t cls;
  bool tagged;
  bool operator>(const Job& o) const { return finish_tag > o.finish_tag; }
};

/// One PS queue in virtual time: every job's remaining solo service time
/// drains at rate 1/n, so a job leaves when virtual time reaches its tag.
QueueRun run_queue(const SimSpec& spec, std::size_t queue, const std::vector<std::size_t>& members, std::size_t rep,
                   std::vector<ClassTally>& tally) {
  QueueRun out;
  std::vector<double> weights;
  for (const auto i : members) weights.push_back(spec.model.alpha(i));
  const double rate = spec.lambda * std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(rate > 0.0)) return out;

  std::seed_seq seq{static_cast<std::uint64_t>(spec.seed), static_cast<std::uint64_t>(rep),
                    static_cast<std::uint64_t>(queue), std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  std::exponential_distribution<double> gap(rate);
  std::exponential_distribution<double> unit_size(1.0);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  const double warmup = spec.warmup();
  const double horizon = spec.horizon_s;
  std::priority_queue<Job, std::vector<Job>, std::greater<>> jobs;
  double t = 0.0, v = 0.0;
  double next_arrival = gap(rng);
  std::uint64_t tagged_open = 0;

  auto advance = [&](double to) {
    const double n = static_cast<double>(jobs.size());
    const double lo = std::clamp(t, warmup, horizon), hi = std::clamp(to, warmup, horizon);
    out.area += n * (hi - lo);
    if (n > 0.0) v += (to - t) / n;
    t = to;
  };

  while (t < horizon || tagged_open > 0) {
    const double next_departure =
        jobs.empty() ? kInf : t + (jobs.top().finish_tag - v) * static_cast<double>(jobs.size());
    if (next_arrival <= next_departure) {
      advance(next_arrival);
      const std::size_t cls = members[pick(rng)];
      const double size = spec.law == FileSizeLaw::exponential ? unit_size(rng) : 1.0;
      const bool tag = t >= warmup && t < horizon;
      jobs.push({v + spec.model.service_time(cls, queue) * size, t, cls, tag});
      if (t < horizon) ++out.arrivals;
      if (tag) ++tagged_open;
      if (spec.trace) *spec.trace << t << ",q" << queue << ",arrival," << cls << ',' << jobs.size() << '\n';
      next_arrival = t + gap(rng);
    } else {
      advance(next_departure);
      const Job job = jobs.top();
      jobs.pop();
      if (jobs.empty()) v = 0.0;  // rebase to keep tags small
      if (t <= horizon) ++out.departures;
      if (job.tagged) {
        const double s = t - job.arrival;
        out.sojourn_sum += s;
        ++out.tagged;
        tally[job.cls].sojourn_sum += s;
        ++tally[job.cls].count;
        --tagged_open;
      }
      if (spec.trace) *spec.trace << t << ",q" << queue << ",departure," << job.cls << ',' << jobs.size() << '\n';
    }
  }
  return out;
}

struct RepResult {
  std::vector<ClassTally> classes;
  std::vector<QueueRun> queues;
};

}  // namespace

SimReport simulate(const SimSpec& spec) {
  spec.validate();
  const std::size_t l = spec.model.location_count();
  const std::size_t nq = spec.model.queue_count();
  std::vector<std::vector<std::size_t>> members(nq);
  for (std::size_t i = 0; i < l; ++i)
    if (spec.model.alpha(i) > 0.0) members[spec.assoc.target[i]].push_back(i);

  SimReport report;
  const auto rho = loads(spec.assoc, spec.model, spec.lambda).rho;
  report.non_stationary = std::any_of(rho.begin(), rho.end(), [](double r) { return r >= 1.0; });

  std::vector<RepResult> reps(spec.replications);
  const std::size_t workers = spec.trace ? 1 : spec.workers;
  parallel_for(spec.replications, workers, [&](std::size_t r) {
    RepResult& rr = reps[r];
    rr.classes.assign(l, {});
    rr.queues.resize(nq);
    for (std::size_t q = 0; q < nq; ++q) rr.queues[q] = run_queue(spec, q, members[q], r, rr.classes);
  });

  const double window = spec.horizon_s - spec.warmup();
  report.per_class.resize(l);
  for (std::size_t i = 0; i < l; ++i) {
    std::vector<double> s;
    for (const auto& rr : reps)
      if (rr.classes[i].count > 0) s.push_back(rr.classes[i].sojourn_sum / static_cast<double>(rr.classes[i].count));
    report.per_class[i] = estimate(s);
    if (!s.empty()) report.max_class_mean = std::max(report.max_class_mean, report.per_class[i].mean);
  }
  std::vector<double> sys;
  for (const auto& rr : reps) {
    double sum = 0.0;
    std::uint64_t cnt = 0;
    for (const auto& q : rr.queues) {
      sum += q.sojourn_sum;
      cnt += q.tagged;
    }
    if (cnt > 0) sys.push_back(sum / static_cast<double>(cnt));
  }
  report.system = estimate(sys);

  report.queues.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    QueueStats& qs = report.queues[q];
    for (const auto i : members[q]) qs.offered_rate += spec.lambda * spec.model.alpha(i);
    std::vector<double> num, soj;
    for (const auto& rr : reps) {
      const auto& run = rr.queues[q];
      num.push_back(run.area / window);
      if (run.tagged > 0) soj.push_back(run.sojourn_sum / static_cast<double>(run.tagged));
      qs.arrivals += run.arrivals;
      qs.departures += run.departures;
    }
    qs.number_in_system = estimate(num);
    qs.sojourn = estimate(soj);
    report.arrivals += qs.arrivals;
    report.departures += qs.departures;
  }
  return report;
}

std::vector<double> littles_check(const SimReport& report) {
  std::vector<double> out;
  out.reserve(report.queues.size());
  for (const auto& q : report.queues) {
    const double lw = q.offered_rate * q.sojourn.mean;
    if (!(q.offered_rate > 0.0) || q.sojourn.samples == 0 || !(lw > 0.0)) {
      out.push_back(0.0);
      continue;
    }
    out.push_back(std::abs(q.number_in_system.mean - lw) / lw);
  }
  return out;
}

}  // namespace hetnet
