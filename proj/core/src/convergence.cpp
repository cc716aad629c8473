#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rightmost/errors.hpp"
#include "rightmost/population.hpp"
#include "rightmost/qsd.hpp"
#include "rightmost/renewal.hpp"

namespace rightmost {

namespace {

constexpr double kZ = 1.96;
constexpr int kReplicates = 10;
constexpr std::size_t kTraceSubsample = 500;

int proof_scale(int n) {
  int m = 0;
  while ((m + 1) * (m + 1) * (m + 1) <= n) ++m;
  return m;
}

// Half-sum of z * SE over patterns, SE from the spread of per-replicate
// proportions.
double replicate_ci(const std::vector<Counter>& reps, const DistributionTable& target) {
  std::vector<std::uint64_t> keys;
  for (const auto& [k, p] : target.probs) keys.push_back(k);
  for (const auto& c : reps) {
    for (const auto& [k, n] : c.counts) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  const auto b = static_cast<double>(reps.size());
  double half = 0.0;
  for (const auto k : keys) {
    double mean = 0.0;
    std::vector<double> props;
    for (const auto& c : reps) {
      props.push_back(static_cast<double>(c[k]) / static_cast<double>(c.total));
      mean += props.back();
    }
    mean /= b;
    double var = 0.0;
    for (const double x : props) var += (x - mean) * (x - mean);
    var /= (b - 1.0);
    half += kZ * std::sqrt(var / b);
  }
  return 0.5 * half;
}

// Patterns absent from the sample contribute zero width.
double multinomial_ci(const DistributionTable& law, std::int64_t samples) {
  const auto s = static_cast<double>(samples);
  double half = 0.0;
  for (const auto& [k, p] : law.probs) half += kZ * std::sqrt(p * (1.0 - p) / s);
  return 0.5 * half;
}

ConvergenceReport full_experiment(const SimParams& params, const std::vector<int>& n_list, int r,
                                  std::int64_t trials, const DistributionTable& target, int threads) {
  std::vector<std::size_t> order(n_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return n_list[a] < n_list[b]; });
  std::vector<int> checkpoints;
  for (const auto i : order) checkpoints.push_back(n_list[i]);

  SimParams horizon = params;
  horizon.n_max = std::max(1, checkpoints.back());
  const Window window = window_for(horizon);
  const LevelConfig start = initial_config(InitialCondition::full(), window, /*truncate_full=*/true);

  PopulationOptions opts;
  opts.replicates = kReplicates;
  opts.particles = std::max<std::int64_t>(2, trials / kReplicates);
  opts.threads = threads;
  opts.keep_keys = true;

  const std::size_t cps = checkpoints.size();
  std::vector<std::vector<Counter>> counts(cps, std::vector<Counter>(kReplicates));
  std::vector<std::int64_t> good(cps, 0);
  std::vector<std::int64_t> traced(cps, 0);
  std::vector<double> reach(kReplicates, 1.0);

  run_population(horizon, window, start, checkpoints, opts,
                 [&](int rep, std::size_t cp, std::span<const Particle> particles, double log_reach) {
                   const auto ri = static_cast<std::size_t>(rep);
                   Counter& c = counts[cp][ri];
                   for (const Particle& part : particles) c.add(project(anchor(part.config), r).bits);
                   if (cp + 1 == cps) reach[ri] = std::exp(log_reach);
                   if (rep != 0) return;
                   const int n = checkpoints[cp];
                   const int m = proof_scale(n);
                   const std::size_t take = std::min(kTraceSubsample, particles.size());
                   for (std::size_t i = 0; i < take; ++i) {
                     const Environment env =
                         environment_from_keys(horizon, window, particles[i].layer_keys);
                     const auto trace = compute_trace(env, start, n);
                     if (!trace) continue;
                     ++traced[cp];
                     if (trace->stop_index <= m && trace->stop_level <= m * m) ++good[cp];
                   }
                 });

  ConvergenceReport report;
  report.reach_probability = std::accumulate(reach.begin(), reach.end(), 0.0) / kReplicates;
  report.rows.resize(n_list.size());
  for (std::size_t j = 0; j < cps; ++j) {
    Counter pooled;
    for (const auto& c : counts[j]) pooled.merge(c);
    ConvergenceRow row;
    row.n = checkpoints[j];
    row.tv = tv_distance(to_distribution(pooled, Support::Cylinder, r), target);
    row.ci = replicate_ci(counts[j], target);
    row.samples = pooled.total;
    row.m = proof_scale(row.n);
    if (traced[j] > 0) row.good_fraction = static_cast<double>(good[j]) / static_cast<double>(traced[j]);
    report.rows[order[j]] = row;
  }
  return report;
}

ConvergenceReport finite_experiment(const SimParams& params, const InitialCondition& init,
                                    const std::vector<int>& n_list, int r, std::int64_t trials,
                                    const DistributionTable& target, int threads) {
  ConvergenceReport report;
  for (const int n : n_list) {
    if (params.p <= 0.45 && n > 40) {
      throw NumericalGuard("rejection conditioning is capped at n <= 40 for p <= 0.45");
    }
    const ZetaSample s = sample_zeta(params, init, n, r, trials, threads);
    if (s.survivors == 0) throw NoData("no trial survived to level " + std::to_string(n));
    const DistributionTable law = to_distribution(s.patterns, Support::Cylinder, r);
    ConvergenceRow row;
    row.n = n;
    row.tv = tv_distance(law, target);
    row.ci = multinomial_ci(law, s.survivors);
    row.samples = s.survivors;
    row.m = proof_scale(n);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace

ConvergenceReport convergence_experiment(const SimParams& params, const InitialCondition& init,
                                         const std::vector<int>& n_list, int r,
                                         std::int64_t trials, const DistributionTable& target,
                                         int threads) {
  params.validate();
  if (n_list.empty()) throw ConfigError("n_list must not be empty");
  for (const int n : n_list) {
    if (n < 0) throw ConfigError("levels in n_list must be >= 0");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (target.support != Support::Cylinder || target.width != r) {
    throw ConfigError("target law must be a cylinder law of radius r=" + std::to_string(r));
  }
  ConvergenceReport report = init.kind == InitialCondition::Kind::Full
                                 ? full_experiment(params, n_list, r, trials, target, threads)
                                 : finite_experiment(params, init, n_list, r, trials, target, threads);
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (!(report.rows[i].tv < report.rows[i - 1].tv)) report.monotone = false;
  }
  return report;
}

}  // namespace rightmost
