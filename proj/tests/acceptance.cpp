// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "rightmost/errors.hpp"
#include "rightmost/lattice.hpp"
#include "rightmost/parallel.hpp"
#include "rightmost/qsd.hpp"
#include "rightmost/renewal.hpp"
#include "rightmost/rightmost_view.hpp"
#include "rightmost/rng.hpp"

using namespace rightmost;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const int kThreads = resolve_threads(0);

Outcome one_step_law() {
  const auto t0 = Clock::now();
  const SimParams params{0.5, 1, 4, 11};
  constexpr std::int64_t trials = 1'000'000;
  std::int64_t dead = 0;
  std::int64_t single = 0;
  std::int64_t pair = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    const Environment env = sample_environment(params, t);
    const ZetaRun run = run_zeta_chain(env, InitialCondition::origin());
    const AnchoredConfig& z = run.states[1];
    if (z.is_empty()) {
      ++dead;
    } else if (z.offsets == std::vector<int>{0}) {
      ++single;
    } else if (z.offsets == std::vector<int>{0, -2}) {
      ++pair;
    }
  }
  const double secs = seconds_since(t0);
  bool ok = dead + single + pair == trials && secs < 10.0;
  std::string detail;
  const std::vector<std::pair<std::int64_t, double>> cells{{dead, 0.25}, {single, 0.5}, {pair, 0.25}};
  for (const auto& [count, p] : cells) {
    const double hat = static_cast<double>(count) / trials;
    const double se = std::sqrt(p * (1 - p) / trials);
    const double z = (hat - p) / se;
    ok = ok && std::abs(z) <= 3.0;
    detail += fmt("%.5f (z=%+.2f) ", hat, z);
  }
  detail += fmt("in %.2fs", secs);
  return {ok, "P(empty), P({0}), P({0,-2}) = " + detail};
}

Outcome oracle_base_case() {
  bool ok = true;
  std::string detail;
  for (const double p : {0.2, 0.4, 0.6}) {
    const auto y = yaglom(build_kernel(p, TruncatedStateSpace{1, Truncation::Project}));
    const double err = std::abs(y.lambda - (1 - (1 - p) * (1 - p)));
    const bool delta = y.nu.probs.size() == 1 && std::abs(y.nu[0] - 1.0) < 1e-15;
    ok = ok && err <= 1e-12 && delta;
    detail += fmt("p=%.1f |err|=%.1e delta=%s; ", p, err, delta ? "yes" : "no");
  }
  return {ok, detail};
}

Outcome qsd_fixed_point() {
  const Kernel k = build_kernel(0.4, TruncatedStateSpace{8, Truncation::Project});
  const auto y = yaglom(k);
  const double residual = fixed_point_residual(k, y.nu);
  const auto laws = conditional_laws(k, 400);
  // nu is itself only known to the iteration tolerance; rises below that are roundoff.
  constexpr double slack = 1e-11;
  bool non_increasing = true;
  double prev = tv_distance(laws[5], y.nu);
  for (std::size_t n = 6; n < laws.size(); ++n) {
    const double tv = tv_distance(laws[n], y.nu);
    if (tv > prev + slack) non_increasing = false;
    prev = tv;
  }
  const bool ok = residual <= 1e-10 && y.iterations < 10000 && non_increasing;
  return {ok, fmt("residual=%.2e iterations=%d TV(nu_n,nu) from %.2e (n=5) to %.2e (n=400), non-increasing up to %.0e: %s",
                  residual, y.iterations, tv_distance(laws[5], y.nu), prev, slack, non_increasing ? "yes" : "no")};
}

Outcome truncation_stability() {
  bool ok = true;
  std::string detail;
  for (const auto mode : {Truncation::Project, Truncation::Kill}) {
    const auto nu = [&](int w) { return yaglom(build_kernel(0.4, TruncatedStateSpace{w, mode})).nu; };
    const auto n6 = nu(6);
    const auto n8 = nu(8);
    const auto n10 = nu(10);
    const double d68 = tv_distance(n6, restrict_depth(n8, 6));
    const double d810 = tv_distance(n8, restrict_depth(n10, 8));
    ok = ok && d810 < d68;
    detail += fmt("%s: TV(6,8)=%.3e TV(8,10)=%.3e; ", mode == Truncation::Project ? "project" : "kill", d68,
                  d810);
  }
  return {ok, detail};
}

Outcome convergence_full() {
  const auto t0 = Clock::now();
  const SimParams params{0.4, 60, 128, 20240601};
  const auto target =
      project_to_cylinder(yaglom(build_kernel(0.4, TruncatedStateSpace{10, Truncation::Project})).nu, 3);
  const auto report = convergence_experiment(params, InitialCondition::full(), {10, 20, 40, 60}, 3, 200'000,
                                             target, /*threads=*/1);
  const double secs = seconds_since(t0);
  std::string detail;
  for (const auto& row : report.rows) detail += fmt("n=%d tv=%.4f+-%.4f; ", row.n, row.tv, row.ci);
  const double last = report.rows.back().tv;
  const bool ok = report.monotone && last <= 0.03 && secs < 300.0;
  detail += fmt("decreasing=%s reach=%.3g in %.1fs", report.monotone ? "yes" : "no", report.reach_probability,
                secs);
  return {ok, detail};
}

Outcome exponential_decay() {
  const SimParams p4{0.4, 40, 2, 7};
  const SimParams p3{0.3, 40, 2, 7};
  const BetaFit b4 = estimate_beta(p4, 1'000'000, 40, kThreads);
  const BetaFit b3 = estimate_beta(p3, 1'000'000, 40, kThreads);
  if (!b4.survival || !b4.beta || !b3.beta) {
    return {false, "degenerate fit: " + b4.note + " / " + b3.note};
  }
  const bool ok = b4.survival->r_squared >= 0.99 && b4.survival->slope < 0 && *b3.beta > *b4.beta;
  return {ok, fmt("p=0.4 survival slope=%.4f R2=%.5f over n in [%g,%g]; beta(0.3)=%.4f+-%.4f "
                  "beta(0.4)=%.4f+-%.4f; survival rate(0.3)=%.4f",
                  b4.survival->slope, b4.survival->r_squared, b4.survival->x_min, b4.survival->x_max, *b3.beta,
                  b3.beta_se.value_or(0.0), *b4.beta, b4.beta_se.value_or(0.0), b3.survival_rate.value_or(NAN))};
}

Outcome renewal_tails() {
  const SimParams params{0.4, 80, 256, 99};
  const TailReport rep = tail_statistics(params, InitialCondition::full(), 80, 100'000, 1'000'000, kThreads);
  bool decreasing = rep.rows.size() >= 4;
  for (std::size_t m = 1; m < 4 && m < rep.rows.size(); ++m) {
    decreasing = decreasing && rep.rows[m].p_i < rep.rows[m - 1].p_i;
  }
  const bool fit_ok = rep.i_fit && rep.i_fit->r_squared >= 0.95;
  bool envelope = rep.beta.beta.has_value();
  std::string violations;
  if (envelope) {
    for (const auto& row : rep.rows) {
      if (row.count_y == 0) continue;
      const double bound = row.p_i + (row.m + 1) * std::exp(-*rep.beta.beta * row.m);
      if (row.p_y > bound) {
        envelope = false;
        violations += fmt(" m=%d", row.m);
      }
    }
  }
  std::string tails;
  for (std::size_t m = 0; m < rep.rows.size() && m < 6; ++m) tails += fmt("%.4g ", rep.rows[m].p_i);
  return {decreasing && fit_ok && envelope,
          fmt("P(I>=m), m=0..: %s; slope=%.3f R2=%.4f; beta=%.4f; envelope held=%s%s; samples=%lld "
              "not_reaching=%.3g",
              tails.c_str(), rep.i_fit ? rep.i_fit->slope : NAN, rep.i_fit ? rep.i_fit->r_squared : NAN,
              rep.beta.beta.value_or(NAN), envelope ? "yes" : "no", violations.c_str(),
              static_cast<long long>(rep.samples), rep.not_reaching_rate)};
}

Outcome monotone_coupling() {
  const SimParams sized{0.5, 100, 110, 5};
  const Window window = window_for(sized);
  const std::vector<double> ps{0.3, 0.5};
  const std::uint64_t family = family_key(sized.seed, StreamFamily::Coupling);
  const LevelConfig start = initial_config(InitialCondition::finite({0, -2, -4, -8, -14}), window);
  std::int64_t good = 0;
  constexpr std::int64_t trials = 10'000;
  for (std::int64_t t = 0; t < trials; ++t) {
    const std::uint64_t key = derive_key(family, static_cast<std::uint64_t>(t));
    std::vector<LevelConfig> configs{start, start};
    bool nested = true;
    for (int level = 0; level < sized.n_max && nested; ++level) {
      const LayerUniforms u = sample_uniforms(window, level, derive_key(key, static_cast<std::uint64_t>(level)));
      configs = coupled_step(configs, u, ps);
      nested = (configs[0].occupancy & configs[1].occupancy) == configs[0].occupancy;
    }
    if (nested) ++good;
  }
  return {good == trials, fmt("%lld/%lld trials nested at every level", static_cast<long long>(good),
                              static_cast<long long>(trials))};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"survival", "--p", "0.45", "--n", "30", "--trials", "20000", "--seed", "8"},
      {"survival", "--p", "0.45", "--n", "30", "--trials", "20000", "--seed", "8", "--format", "json"},
      {"qsd-mc", "--p", "0.5", "--n", "8", "--r", "4", "--trials", "20000"},
      {"qsd-exact", "--p", "0.4", "--w", "8"},
      {"converge", "--p", "0.4", "--n-list", "10,20", "--w", "8", "--trials", "4000"},
      {"converge", "--p", "0.5", "--n-list", "5,10", "--initial", "origin", "--w", "8", "--trials", "20000",
       "--format", "json"},
      {"renewal", "--n", "24", "--window", "64", "--trials", "2000", "--beta-trials", "20000"},
  };
  int same = 0;
  std::string which;
  for (auto cmd : commands) {
    std::vector<std::string> outs;
    for (const char* threads : {"1", "8"}) {
      auto args = cmd;
      args.insert(args.end(), {"--threads", threads});
      if (cmd[0] == "qsd-exact") args.resize(cmd.size());
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run_cli(args, out, err);
      outs.push_back(code == 0 ? out.str() : "exit " + std::to_string(code) + ": " + err.str());
    }
    if (outs[0] == outs[1] && outs[0].rfind("exit ", 0) != 0) {
      ++same;
    } else {
      which += " " + cmd[0];
    }
  }
  const auto total = static_cast<int>(commands.size());
  return {same == total, fmt("%d/%d commands byte-identical at 1 and 8 threads%s", same, total,
                             which.empty() ? "" : (";  differing:" + which).c_str())};
}

Outcome performance() {
  const auto t0 = Clock::now();
  const SimParams params{0.4, 100, 256, 3};
  std::int64_t alive = 0;
  for (std::int64_t t = 0; t < 100'000; ++t) {
    const Environment env = sample_environment(params, t);
    const ZetaRun run = run_zeta_chain(env, InitialCondition::full());
    if (run.survival.alive_at(100)) ++alive;
  }
  const double secs = seconds_since(t0);
  return {secs < 60.0, fmt("1e5 FULL trials, n=100, W=256 on one thread in %.2fs (alive at 100: %lld)", secs,
                           static_cast<long long>(alive))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"one-step law", one_step_law},
      {"oracle base case", oracle_base_case},
      {"QSD fixed point", qsd_fixed_point},
      {"truncation stability", truncation_stability},
      {"convergence from FULL", convergence_full},
      {"exponential decay", exponential_decay},
      {"renewal tails", renewal_tails},
      {"monotone coupling", monotone_coupling},
      {"determinism", determinism},
      {"performance", performance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
