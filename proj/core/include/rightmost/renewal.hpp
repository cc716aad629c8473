#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rightmost/estimators.hpp"
#include "rightmost/lattice.hpp"
#include "rightmost/rightmost_view.hpp"

namespace rightmost {

/// Forward light cone of the space-time point (x, m).
struct Cone {
  int x = 0;
  int m = 0;

  bool contains(int y, int k) const noexcept {
    const int d = y > x ? y - x : x - y;
    return k >= m && d <= k - m;
  }
};

struct SpaceTime {
  int x = 0;
  int y = 0;  // level
  friend bool operator==(const SpaceTime&, const SpaceTime&) = default;
};

/// Renewal points (X_i, Y_i) for i = 0..I+1; the last two coincide.
struct RenewalTrace {
  std::vector<SpaceTime> pairs;
  int stop_index = 0;  // I: first i with Y_i = Y_{i+1}
  int stop_level = 0;  // Y_I
};

/// Renewal construction on a fixed environment for the level-0 set
/// `initial` and horizon n <= env.levels().
///
/// X_0 is the rightmost site of `initial` with an open path to level n.
/// Given (X_i, Y_i), the sites of xi_{Y_i} strictly right of X_i are run
/// forward and Y_{i+1} is the highest level k <= n at which they meet the
/// cone of (X_i, Y_i), or Y_i if they never do; X_{i+1} is the rightmost
/// site of xi_{Y_{i+1}} that still reaches level n. Returns nullopt when
/// no site of `initial` reaches level n. Throws WindowOverflow if the
/// forward run loses a site through the right edge.
std::optional<RenewalTrace> compute_trace(const Environment& env, const LevelConfig& initial, int n);

struct TailRow {
  int m = 0;
  std::int64_t count_i = 0;    // traces with I >= m
  double p_i = 0.0;
  std::int64_t count_y = 0;    // traces with Y_I >= m^2
  double p_y = 0.0;
};

struct BetaFit {
  std::optional<DecayFit> survival;  // log P(T > n) against n
  std::optional<DecayFit> cone;      // log P(cone entry at level >= m) against m
  std::optional<double> beta;        // -slope of the cone fit
  std::optional<double> beta_se;
  std::optional<double> survival_rate;  // -slope of the survival fit
  std::vector<DecayPoint> survival_points;
  std::vector<DecayPoint> cone_points;
  std::int64_t trials = 0;
  std::string note;  // why a fit is missing, if one is
};

struct TailReport {
  std::vector<TailRow> rows;
  std::optional<DecayFit> i_fit;  // log P(I >= m) against m, bins with count >= 100
  BetaFit beta;
  std::int64_t samples = 0;       // traces tabulated
  double reach_probability = 0.0; // estimate of P(the truncated start reaches level n)
  double not_reaching_rate = 0.0; // 1 - reach_probability
  int window_width = 0;
};

inline constexpr std::int64_t kTailMinCount = 100;

/// Empirical tails of I and Y_I at horizon n for the FULL start truncated
/// to the window, over traces conditioned on reaching level n (population
/// resampling, ten replicates of trials/10 particles). The beta fit uses
/// `beta_trials` cone-escape trials.
TailReport tail_statistics(const SimParams& params, const InitialCondition& init, int n,
                           std::int64_t trials, std::int64_t beta_trials, int threads);

/// Two decay fits over levels fit_from..m_max: survival of the chain
/// from {0}, and the probability that some open path from a site y > 0 at
/// level 0 visits the cone of (0, 0) at a level >= m. Points enter a fit
/// only with count >= min_count; a missing fit is recorded in `note`
/// rather than thrown.
BetaFit estimate_beta(const SimParams& params, std::int64_t trials, int m_max, int threads,
                      std::int64_t min_count = kDefaultMinCount, int fit_from = 10);

}  // namespace rightmost
