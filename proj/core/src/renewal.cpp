#include "rightmost/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "rightmost/errors.hpp"
#include "rightmost/parallel.hpp"
#include "rightmost/population.hpp"
#include "rightmost/qsd.hpp"
#include "rightmost/rng.hpp"

namespace rightmost {

namespace {

// Index range of the cone of `apex` at `level`, intersected with the window.
bool meets_cone(const LevelConfig& config, const Cone& apex) {
  const int d = config.level - apex.m;
  const int lo = (apex.x - d - config.origin) / 2;
  const int hi = (apex.x + d - config.origin) / 2;
  return config.occupancy.any_in(lo, hi);
}

// Highest level k in (from.level, n] at which the forward image of `from`
// meets `apex`'s cone, or from.level if it never does.
int last_cone_visit(const Environment& env, LevelConfig from, const Cone& apex, int n) {
  int best = from.level;
  while (from.level < n && !from.empty()) {
    from = step_forward(from, env.layer(from.level));
    if (meets_cone(from, apex)) best = from.level;
  }
  return best;
}

std::optional<int> rightmost_common(const LevelConfig& a, const LevelConfig& b) {
  const auto i = (a.occupancy & b.occupancy).highest();
  if (!i) return std::nullopt;
  return a.position(*i);
}

}  // namespace

std::optional<RenewalTrace> compute_trace(const Environment& env, const LevelConfig& initial, int n) {
  if (n < 0 || n > env.levels()) throw ContractViolation("compute_trace: horizon out of range");
  if (initial.level != 0) throw ContractViolation("compute_trace: initial set must sit at level 0");

  LevelConfig start = initial;
  start.boundary = BoundaryMode::Free;
  const auto xi = forward_reach(env, start, 0, n);
  if (xi.back().lost_right) throw WindowOverflow("renewal: a site left the window through the right edge");
  const auto reach = backward_reach(env, n);

  const auto x0 = rightmost_common(xi[0], reach[0]);
  if (!x0) return std::nullopt;

  RenewalTrace trace;
  trace.pairs.push_back({*x0, 0});
  for (int i = 0;; ++i) {
    const SpaceTime cur = trace.pairs.back();
    const LevelConfig& level = xi[static_cast<std::size_t>(cur.y)];
    LevelConfig right = level;
    right.boundary = BoundaryMode::Free;
    right.lost_left = right.lost_right = false;
    right.occupancy.clear_below(*level.index_of(cur.x) + 1);

    const int next_y = last_cone_visit(env, std::move(right), Cone{cur.x, cur.y}, n);
    const auto next_x = rightmost_common(xi[static_cast<std::size_t>(next_y)],
                                         reach[static_cast<std::size_t>(next_y)]);
    if (!next_x) throw ContractViolation("renewal: no reaching site on the path of X_i");
    trace.pairs.push_back({*next_x, next_y});
    if (next_y == cur.y) {
      trace.stop_index = i;
      trace.stop_level = cur.y;
      return trace;
    }
  }
}

BetaFit estimate_beta(const SimParams& params, std::int64_t trials, int m_max, int threads,
                      std::int64_t min_count, int fit_from) {
  params.validate();
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (m_max < 3) throw ConfigError("m_max must be >= 3");
  const BernoulliWord bonds(params.p);
  BetaFit out;
  out.trials = trials;
  using Hist = std::vector<std::int64_t>;
  const auto hist_size = static_cast<std::size_t>(m_max) + 1;
  auto merge = [](Hist& into, const Hist& part) {
    for (std::size_t i = 0; i < into.size(); ++i) into[i] += part[i];
  };

  SimParams horizon = params;
  horizon.n_max = m_max;
  horizon.window_width = (m_max + 1) / 2 + (m_max + 1) / 2 + 2;
  const auto alive = survival_counts(horizon, InitialCondition::origin(), trials, threads);

  // Cone escape: every even site in [2, 2R] occupied at level 0; record the
  // highest level k <= m_max at which the image meets [-k, k].
  const int sites = m_max + 2;
  const int base = -2 * ((m_max + 2) / 2);
  const int width = (2 * sites + m_max + 1 - base) / 2 + 2;
  const Window cone_window{width, base};
  std::vector<int> right_sites;
  for (int y = 2; y <= 2 * sites; y += 2) right_sites.push_back(y);
  const LevelConfig right_start =
      LevelConfig::from_positions(0, cone_window.origin(0), static_cast<std::size_t>(width), right_sites);
  const std::uint64_t cone_family = family_key(params.seed, StreamFamily::ConeEscape);
  const Hist last_visit = run_trials(
      trials, threads, Hist(hist_size, 0),
      [&](std::int64_t t, Hist& acc) {
        const std::uint64_t trial_key = derive_key(cone_family, static_cast<std::uint64_t>(t));
        LevelConfig c = right_start;
        int best = 0;
        for (int k = 0; k < m_max && !c.empty(); ++k) {
          c = step_forward(c, generate_layer(bonds, cone_window, k,
                                             derive_key(trial_key, static_cast<std::uint64_t>(k))));
          if (meets_cone(c, Cone{0, 0})) best = k + 1;
        }
        ++acc[static_cast<std::size_t>(best)];
      },
      merge);

  std::int64_t cone = trials;  // trials with a cone visit at level >= m
  for (int m = 1; m <= m_max; ++m) {
    const std::int64_t surv = alive[static_cast<std::size_t>(m)];
    cone -= last_visit[static_cast<std::size_t>(m - 1)];
    const double dt = static_cast<double>(trials);
    if (m >= fit_from) {
      out.survival_points.push_back({static_cast<double>(m), static_cast<double>(surv) / dt, surv});
      out.cone_points.push_back({static_cast<double>(m), static_cast<double>(cone) / dt, cone});
    }
  }

  try {
    out.survival = fit_log_linear(out.survival_points, min_count);
    out.survival_rate = -out.survival->slope;
  } catch (const NoData&) {
    out.note += "survival fit degenerate: fewer than 3 levels with enough surviving trials. ";
  }
  try {
    out.cone = fit_log_linear(out.cone_points, min_count);
    out.beta = -out.cone->slope;
    out.beta_se = out.cone->slope_se;
  } catch (const NoData&) {
    out.note += "cone fit degenerate: fewer than 3 levels with enough cone visits.";
  }
  while (!out.note.empty() && out.note.back() == ' ') out.note.pop_back();
  return out;
}

TailReport tail_statistics(const SimParams& params, const InitialCondition& init, int n,
                           std::int64_t trials, std::int64_t beta_trials, int threads) {
  params.validate();
  if (n < 1) throw ConfigError("renewal horizon n must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  SimParams horizon = params;
  horizon.n_max = n;
  const Window window = window_for(horizon);
  const LevelConfig start = initial_config(init, window, /*truncate_full=*/true);

  constexpr int kReplicates = 10;
  PopulationOptions opts;
  opts.replicates = kReplicates;
  opts.particles = std::max<std::int64_t>(1, trials / kReplicates);
  opts.threads = threads;
  opts.keep_keys = true;

  struct Tally {
    std::vector<std::int64_t> stop_index;  // histogram of I
    std::vector<std::int64_t> stop_level;  // histogram of Y_I
    std::int64_t traces = 0;
    double reach = 0.0;
  };
  std::vector<Tally> tallies(kReplicates);
  auto bump = [](std::vector<std::int64_t>& h, int v) {
    if (h.size() <= static_cast<std::size_t>(v)) h.resize(static_cast<std::size_t>(v) + 1, 0);
    ++h[static_cast<std::size_t>(v)];
  };
  run_population(horizon, window, start, {n}, opts,
                 [&](int rep, std::size_t, std::span<const Particle> particles, double log_reach) {
                   Tally& t = tallies[static_cast<std::size_t>(rep)];
                   t.reach = std::exp(log_reach);
                   for (const Particle& part : particles) {
                     const Environment env = environment_from_keys(horizon, window, part.layer_keys);
                     const auto trace = compute_trace(env, start, n);
                     if (!trace) continue;
                     bump(t.stop_index, trace->stop_index);
                     bump(t.stop_level, trace->stop_level);
                     ++t.traces;
                   }
                 });

  TailReport report;
  report.window_width = window.width;
  std::vector<std::int64_t> hist_i;
  std::vector<std::int64_t> hist_y;
  for (const Tally& t : tallies) {
    report.samples += t.traces;
    report.reach_probability += t.reach;
    if (hist_i.size() < t.stop_index.size()) hist_i.resize(t.stop_index.size(), 0);
    if (hist_y.size() < t.stop_level.size()) hist_y.resize(t.stop_level.size(), 0);
    for (std::size_t v = 0; v < t.stop_index.size(); ++v) hist_i[v] += t.stop_index[v];
    for (std::size_t v = 0; v < t.stop_level.size(); ++v) hist_y[v] += t.stop_level[v];
  }
  report.reach_probability /= kReplicates;
  report.not_reaching_rate = 1.0 - report.reach_probability;
  if (report.samples == 0) throw NoData("no trace reached level " + std::to_string(n));

  auto tail = [](const std::vector<std::int64_t>& h, std::size_t from) {
    std::int64_t s = 0;
    for (std::size_t v = from; v < h.size(); ++v) s += h[v];
    return s;
  };
  int m_top = static_cast<int>(hist_i.size());
  while (static_cast<std::size_t>(m_top) * static_cast<std::size_t>(m_top) < hist_y.size()) ++m_top;
  m_top = std::max(m_top, 4);
  const auto total = static_cast<double>(report.samples);
  std::vector<DecayPoint> points;
  for (int m = 0; m <= m_top; ++m) {
    TailRow row;
    row.m = m;
    row.count_i = tail(hist_i, static_cast<std::size_t>(m));
    row.count_y = tail(hist_y, static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    row.p_i = static_cast<double>(row.count_i) / total;
    row.p_y = static_cast<double>(row.count_y) / total;
    report.rows.push_back(row);
    points.push_back({static_cast<double>(m), row.p_i, row.count_i});
  }
  try {
    report.i_fit = fit_log_linear(points, kTailMinCount);
  } catch (const NoData&) {
    report.i_fit.reset();
  }
  report.beta = estimate_beta(params, beta_trials, 40, threads);
  return report;
}

}  // namespace rightmost
