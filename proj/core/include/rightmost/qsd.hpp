#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rightmost/distribution.hpp"
#include "rightmost/estimators.hpp"
#include "rightmost/lattice.hpp"
#include "rightmost/rightmost_view.hpp"

namespace rightmost {

/// What happens to offsets that fall below the tracked depth.
enum class Truncation { Project, Kill };

inline constexpr int kMaxOracleWidth = 12;

/// Anchored configurations contained in {0, -2, ..., -2(w-1)}.
///
/// State s stands for the offsets {0} plus {-2k : bit k-1 of s set}, so
/// there are 2^(w-1) states and s = 0 is {0}. EMPTY is not a state; it
/// shows up as absorption mass.
struct TruncatedStateSpace {
  int w = 1;
  Truncation mode = Truncation::Project;

  /// Throws ConfigError for w < 1 and NumericalGuard for w > 12.
  void validate() const;
  std::size_t size() const noexcept { return std::size_t{1} << (w - 1); }
  static std::vector<int> offsets_of(std::uint64_t state);
  /// Inverse of offsets_of; throws ContractViolation if the offsets do not
  /// fit in depth w.
  std::uint64_t state_of(const std::vector<int>& offsets) const;
};

/// Substochastic transition table among the non-EMPTY states, row-major,
/// plus the absorption mass of each row.
struct Kernel {
  TruncatedStateSpace space;
  double p = 0.0;
  std::vector<double> matrix;
  std::vector<double> absorption;

  std::size_t size() const noexcept { return absorption.size(); }
  double at(std::size_t from, std::size_t to) const noexcept { return matrix[from * size() + to]; }
};

/// Exact one-step law of the truncated chain. Child sites are independent
/// given the parent configuration, each occupied with probability
/// 1 - (1-p)^(number of occupied parents), so the table is accumulated as
/// a product over children.
Kernel build_kernel(double p, const TruncatedStateSpace& space);

/// One step of the conditioned chain from `law`: returns normalize(law K)
/// and stores the surviving mass in *survival if given. Throws NoData if
/// nothing survives.
DistributionTable step_law(const Kernel& kernel, const DistributionTable& law,
                           double* survival = nullptr);

/// Point mass on the state {0}.
DistributionTable origin_law(const TruncatedStateSpace& space);

struct YaglomResult {
  DistributionTable nu;
  double lambda = 0.0;
  int iterations = 0;
};

/// Power iteration from {0} until successive iterates are within `tol`
/// in total variation. Throws NumericalGuard without convergence.
YaglomResult yaglom(const Kernel& kernel, double tol = 1e-12, int max_iter = 10000);

/// TV(normalize(law K), law).
double fixed_point_residual(const Kernel& kernel, const DistributionTable& law);

/// Element n is the exact law of the truncated chain at level n started
/// from {0} and conditioned on survival, for n = 0..levels.
std::vector<DistributionTable> conditional_laws(const Kernel& kernel, int levels);

/// Marginal on the coordinates -2..-2r of a law over anchored states.
/// Requires r <= w-1.
DistributionTable project_to_cylinder(const DistributionTable& states, int r);

/// Marginal on the states of a shallower space of depth w_small.
DistributionTable restrict_depth(const DistributionTable& states, int w_small);

/// Empirical cylinder law of zeta_n over trials that survive to level n.
struct ZetaSample {
  Counter patterns;         // keyed by CylinderPattern bits
  std::int64_t trials = 0;  // all trials, including absorbed ones
  std::int64_t survivors = 0;
};

/// Plain Monte Carlo of the anchored chain from a finite initial set.
/// Trial t uses environment stream t of params.seed, so results do not
/// depend on `threads`.
ZetaSample sample_zeta(const SimParams& params, const InitialCondition& init, int n, int r,
                       std::int64_t trials, int threads);

/// Element n counts the trials still alive at level n, n = 0..params.n_max,
/// for a finite initial set. Same trial streams as sample_zeta.
std::vector<std::int64_t> survival_counts(const SimParams& params, const InitialCondition& init,
                                          std::int64_t trials, int threads);

struct ConditionalLaw {
  DistributionTable law;
  ZetaSample sample;
};

/// law(project(zeta_n, r) | T > n) from ORIGIN by rejection. Throws
/// NumericalGuard for n > 40 when p <= 0.45 and NoData with no survivors.
ConditionalLaw conditional_law_mc(const SimParams& params, int n, int r, std::int64_t trials,
                                  int threads);

struct ConvergenceRow {
  int n = 0;
  double tv = 0.0;
  double ci = 0.0;             // half-width of an approximate 95% interval
  std::int64_t samples = 0;    // survivors (finite start) or particles (FULL)
  int m = 0;                   // floor(n^(1/3))
  std::optional<double> good_fraction;  // P(I <= m, Y_I <= m^2) on a subsample
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool monotone = false;  // tv strictly decreasing along n_list
  double reach_probability = 1.0;  // FULL only: estimate of P(level max(n_list) is reached)
};

/// Distance between the empirical law of project(zeta_n, r) and `target`
/// for every n in `n_list`.
///
/// FULL starts from every tracked site at or left of 0 in the window and
/// is conditioned on reaching level n by population resampling (ten
/// independent replicates; the interval comes from their spread). Finite
/// starts are conditioned on survival by rejection with a multinomial
/// interval.
ConvergenceReport convergence_experiment(const SimParams& params, const InitialCondition& init,
                                         const std::vector<int>& n_list, int r,
                                         std::int64_t trials, const DistributionTable& target,
                                         int threads);

}  // namespace rightmost
