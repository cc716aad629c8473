#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rightmost/rng.hpp"
#include "rightmost/site_set.hpp"

namespace rightmost {

struct SimParams {
  double p = 0.5;
  int n_max = 1;
  int window_width = 2;  // tracked even-parity sites per level
  std::uint64_t seed = 0;

  /// Throws ConfigError unless 0 <= p <= 1, n_max >= 1 and window_width >= 2.
  /// The degenerate endpoints are accepted for sanity runs; the model of
  /// interest is 0 < p < p_c.
  void validate() const;
};

enum class BoundaryMode { Free, FullLeft };

/// Static window geometry: at even levels the tracked sites are
/// base_origin, base_origin + 2, ...; at odd levels everything is shifted
/// right by one. The window therefore does not drift with time.
struct Window {
  int width = 0;
  int base_origin = 0;  // even

  int origin(int level) const noexcept { return base_origin + (level & 1); }
  int position(int level, std::size_t index) const noexcept {
    return origin(level) + 2 * static_cast<int>(index);
  }
  /// Index of lattice site x at `level`, if tracked.
  std::optional<std::size_t> index(int level, int x) const noexcept;
};

/// Window used for a parameter set: site 0 sits at index W-1-M where
/// M = ceil(n_max/2), so the rightmost point (which moves at most +1 per
/// level) can never leave through the right edge within n_max levels.
Window window_for(const SimParams& params);

/// Occupied sites of one level, restricted to the window.
struct LevelConfig {
  int level = 0;
  int origin = 0;  // origin + level is even
  SiteSet occupancy;
  BoundaryMode boundary = BoundaryMode::Free;
  bool lost_left = false;   // an occupied site was dropped at the left edge (Free mode)
  bool lost_right = false;  // an occupied site was dropped at the right edge

  std::size_t width() const noexcept { return occupancy.size(); }
  int position(std::size_t index) const noexcept { return origin + 2 * static_cast<int>(index); }
  std::optional<std::size_t> index_of(int x) const noexcept;
  bool contains(int x) const noexcept;
  bool empty() const noexcept { return occupancy.none(); }
  std::optional<int> rightmost() const noexcept;
  std::vector<int> positions() const;

  static LevelConfig from_positions(int level, int origin, std::size_t width,
                                    std::span<const int> occupied,
                                    BoundaryMode boundary = BoundaryMode::Free);
};

/// Bonds from level `level` to level+1. left_open[i] is the bond from
/// tracked site i to (x-1, level+1), right_open[i] the bond to (x+1, level+1).
/// fringe_open drives the FULL-LEFT boundary injection.
struct BondLayer {
  int level = 0;
  int origin = 0;
  SiteSet left_open;
  SiteSet right_open;
  bool fringe_open = false;
};

/// Probability that the leftmost tracked site is fed by the occupied
/// off-window fringe in FULL-LEFT mode: 1 - (1-p)^2.
double fringe_probability(double p) noexcept;

/// Draws one bond layer from the stream `key`. Consumption order: the
/// left-bond words in site order, then the right-bond words, then one
/// uniform for the fringe bit.
BondLayer generate_layer(double p, const Window& window, int level, std::uint64_t key);
BondLayer generate_layer(const BernoulliWord& bonds, const Window& window, int level,
                         std::uint64_t key);

/// Stream key of layer `level` in trial `trial_index`.
std::uint64_t trial_layer_key(std::uint64_t seed, std::int64_t trial_index, int level) noexcept;

struct Environment {
  SimParams params;
  Window window;
  std::int64_t trial_index = 0;
  std::vector<BondLayer> layers;  // levels 0 .. n_max-1

  int levels() const noexcept { return static_cast<int>(layers.size()); }
  const BondLayer& layer(int level) const;
};

/// Materializes every bond of trial `trial_index`; deterministic in
/// (params.seed, trial_index).
Environment sample_environment(const SimParams& params, std::int64_t trial_index);

/// Rebuilds an environment whose layer k was drawn from stream keys[k].
Environment environment_from_keys(const SimParams& params, const Window& window,
                                  std::span<const std::uint64_t> keys);

/// Environment with every bond set to `open` (and the fringe bit too).
Environment uniform_environment(const SimParams& params, const Window& window, bool open);

/// Advances one level. Throws ContractViolation on level/origin mismatch.
/// Sites pushed out of the window set lost_left / lost_right; in FULL-LEFT
/// mode the leftmost tracked site is additionally occupied when the layer's
/// fringe bit is set, and left losses are absorbed by the fringe.
LevelConfig step_forward(const LevelConfig& config, const BondLayer& layer);

/// Element k is the configuration at level from_level + k.
std::vector<LevelConfig> forward_reach(const Environment& env, const LevelConfig& initial,
                                       int from_level, int to_level);

/// Element k holds the tracked sites at level k with an open path to level
/// target_level that stays inside the window. Returned configs use the
/// Free boundary and carry no loss flags.
std::vector<LevelConfig> backward_reach(const Environment& env, int target_level);

/// Per-bond uniforms shared by several values of p.
struct LayerUniforms {
  int level = 0;
  int origin = 0;
  std::vector<double> left;
  std::vector<double> right;
  double fringe = 1.0;
};

LayerUniforms sample_uniforms(const Window& window, int level, std::uint64_t key);

/// Thresholds the shared uniforms at p: bond open iff uniform < p.
BondLayer threshold_layer(const LayerUniforms& uniforms, double p);

/// One step for each p in the strictly increasing p_list, configs[k]
/// being the current configuration under p_list[k]. With shared uniforms
/// occupancy is nested in p.
std::vector<LevelConfig> coupled_step(std::span<const LevelConfig> configs,
                                      const LayerUniforms& uniforms,
                                      std::span<const double> p_list);

/// Convenience overload: the same configuration under every p.
std::vector<LevelConfig> coupled_step(const LevelConfig& config, const LayerUniforms& uniforms,
                                      std::span<const double> p_list);

}  // namespace rightmost
