#include "rightmost/lattice.hpp"

#include <cmath>
#include <string>

#include "rightmost/errors.hpp"
#include "rightmost/rng.hpp"

namespace rightmost {

void SimParams::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p must lie in [0,1], got " + std::to_string(p));
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  if (window_width < 2) throw ConfigError("window_width must be >= 2");
}

std::optional<std::size_t> Window::index(int level, int x) const noexcept {
  const int d = x - origin(level);
  if (d < 0 || (d & 1) != 0 || d / 2 >= width) return std::nullopt;
  return static_cast<std::size_t>(d / 2);
}

Window window_for(const SimParams& params) {
  const int margin = (params.n_max + 1) / 2;
  const int left = params.window_width - 1 - margin;
  if (left < 0) {
    throw ConfigError("window_width " + std::to_string(params.window_width) +
                      " leaves no room for site 0 with n_max " + std::to_string(params.n_max));
  }
  return Window{params.window_width, -2 * left};
}

std::optional<std::size_t> LevelConfig::index_of(int x) const noexcept {
  const int d = x - origin;
  if (d < 0 || (d & 1) != 0 || static_cast<std::size_t>(d / 2) >= width()) return std::nullopt;
  return static_cast<std::size_t>(d / 2);
}

bool LevelConfig::contains(int x) const noexcept {
  const auto i = index_of(x);
  return i && occupancy.test(*i);
}

std::optional<int> LevelConfig::rightmost() const noexcept {
  const auto top = occupancy.highest();
  if (!top) return std::nullopt;
  return position(*top);
}

std::vector<int> LevelConfig::positions() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < width(); ++i) {
    if (occupancy.test(i)) out.push_back(position(i));
  }
  return out;
}

LevelConfig LevelConfig::from_positions(int level, int origin, std::size_t width,
                                        std::span<const int> occupied, BoundaryMode boundary) {
  if (((origin + level) & 1) != 0) throw ContractViolation("origin parity does not match level");
  LevelConfig c{level, origin, SiteSet(width), boundary};
  for (const int x : occupied) {
    const auto i = c.index_of(x);
    if (!i) {
      throw ContractViolation("site " + std::to_string(x) + " is outside the window or has the wrong parity");
    }
    c.occupancy.set(*i);
  }
  return c;
}

double fringe_probability(double p) noexcept { return 1.0 - (1.0 - p) * (1.0 - p); }

std::uint64_t trial_layer_key(std::uint64_t seed, std::int64_t trial_index, int level) noexcept {
  const auto trial = derive_key(family_key(seed, StreamFamily::Trials),
                                static_cast<std::uint64_t>(trial_index));
  return derive_key(trial, static_cast<std::uint64_t>(level));
}

BondLayer generate_layer(const BernoulliWord& bonds, const Window& window, int level,
                         std::uint64_t key) {
  SplitMix64 engine(key);
  BondLayer layer{level, window.origin(level), SiteSet(static_cast<std::size_t>(window.width)),
                  SiteSet(static_cast<std::size_t>(window.width)), false};
  for (auto& w : layer.left_open.words()) w = bonds(engine);
  layer.left_open.trim();
  for (auto& w : layer.right_open.words()) w = bonds(engine);
  layer.right_open.trim();
  layer.fringe_open = uniform01(engine) < fringe_probability(bonds.probability());
  return layer;
}

BondLayer generate_layer(double p, const Window& window, int level, std::uint64_t key) {
  return generate_layer(BernoulliWord(p), window, level, key);
}

const BondLayer& Environment::layer(int level) const {
  if (level < 0 || level >= levels()) {
    throw ContractViolation("no bond layer for level " + std::to_string(level));
  }
  return layers[static_cast<std::size_t>(level)];
}

Environment sample_environment(const SimParams& params, std::int64_t trial_index) {
  if (trial_index < 0) throw ContractViolation("trial_index must be >= 0");
  const Window window = window_for(params);
  const BernoulliWord bonds(params.p);
  Environment env{params, window, trial_index, {}};
  env.layers.reserve(static_cast<std::size_t>(params.n_max));
  for (int k = 0; k < params.n_max; ++k) {
    env.layers.push_back(generate_layer(bonds, window, k, trial_layer_key(params.seed, trial_index, k)));
  }
  return env;
}

Environment environment_from_keys(const SimParams& params, const Window& window,
                                  std::span<const std::uint64_t> keys) {
  const BernoulliWord bonds(params.p);
  Environment env{params, window, -1, {}};
  env.layers.reserve(keys.size());
  for (std::size_t k = 0; k < keys.size(); ++k) {
    env.layers.push_back(generate_layer(bonds, window, static_cast<int>(k), keys[k]));
  }
  return env;
}

Environment uniform_environment(const SimParams& params, const Window& window, bool open) {
  Environment env{params, window, -1, {}};
  for (int k = 0; k < params.n_max; ++k) {
    const auto w = static_cast<std::size_t>(window.width);
    env.layers.push_back(BondLayer{k, window.origin(k), SiteSet(w, open), SiteSet(w, open), open});
  }
  return env;
}

LevelConfig step_forward(const LevelConfig& config, const BondLayer& layer) {
  if (config.level != layer.level || config.origin != layer.origin) {
    throw ContractViolation("step_forward: config at level " + std::to_string(config.level) +
                            " does not match bond layer at level " + std::to_string(layer.level));
  }
  if (layer.left_open.size() != config.width()) {
    throw ContractViolation("step_forward: layer width differs from config width");
  }
  const SiteSet& occ = config.occupancy;
  LevelConfig next{config.level + 1, 0, SiteSet(), config.boundary, config.lost_left,
                   config.lost_right};
  const bool free = config.boundary == BoundaryMode::Free;
  if ((config.level & 1) == 0) {
    // Children sit at x+1: child i is fed by site i (right bond) and site i+1 (left bond).
    next.origin = config.origin + 1;
    next.occupancy = (occ & layer.right_open) | (occ & layer.left_open).shifted_down();
    if (free && occ.test(0) && layer.left_open.test(0)) next.lost_left = true;
  } else {
    // Children sit at x-1: child i is fed by site i (left bond) and site i-1 (right bond).
    next.origin = config.origin - 1;
    const std::size_t last = config.width() - 1;
    next.occupancy = (occ & layer.left_open) | (occ & layer.right_open).shifted_up();
    if (occ.test(last) && layer.right_open.test(last)) next.lost_right = true;
  }
  if (!free && layer.fringe_open) next.occupancy.set(0);
  return next;
}

std::vector<LevelConfig> forward_reach(const Environment& env, const LevelConfig& initial,
                                       int from_level, int to_level) {
  if (from_level < 0 || from_level > to_level || to_level > env.levels()) {
    throw ContractViolation("forward_reach: levels out of range");
  }
  if (initial.level != from_level) {
    throw ContractViolation("forward_reach: initial config is not at from_level");
  }
  std::vector<LevelConfig> out;
  out.reserve(static_cast<std::size_t>(to_level - from_level + 1));
  out.push_back(initial);
  for (int k = from_level; k < to_level; ++k) {
    out.push_back(step_forward(out.back(), env.layer(k)));
  }
  return out;
}

std::vector<LevelConfig> backward_reach(const Environment& env, int target_level) {
  if (target_level < 0 || target_level > env.levels()) {
    throw ContractViolation("backward_reach: target level out of range");
  }
  const auto width = static_cast<std::size_t>(env.window.width);
  std::vector<LevelConfig> out(static_cast<std::size_t>(target_level + 1));
  out.back() = LevelConfig{target_level, env.window.origin(target_level), SiteSet(width, true)};
  for (int k = target_level - 1; k >= 0; --k) {
    const BondLayer& layer = env.layer(k);
    const SiteSet& above = out[static_cast<std::size_t>(k + 1)].occupancy;
    SiteSet alive = (k & 1) == 0
                        ? (layer.right_open & above) | (layer.left_open & above.shifted_up())
                        : (layer.left_open & above) | (layer.right_open & above.shifted_down());
    out[static_cast<std::size_t>(k)] = LevelConfig{k, env.window.origin(k), std::move(alive)};
  }
  return out;
}

LayerUniforms sample_uniforms(const Window& window, int level, std::uint64_t key) {
  SplitMix64 engine(key);
  LayerUniforms u{level, window.origin(level), {}, {}, 1.0};
  const auto w = static_cast<std::size_t>(window.width);
  u.left.resize(w);
  u.right.resize(w);
  for (auto& x : u.left) x = uniform01(engine);
  for (auto& x : u.right) x = uniform01(engine);
  u.fringe = uniform01(engine);
  return u;
}

BondLayer threshold_layer(const LayerUniforms& uniforms, double p) {
  const std::size_t w = uniforms.left.size();
  BondLayer layer{uniforms.level, uniforms.origin, SiteSet(w), SiteSet(w), false};
  for (std::size_t i = 0; i < w; ++i) {
    layer.left_open.set(i, uniforms.left[i] < p);
    layer.right_open.set(i, uniforms.right[i] < p);
  }
  layer.fringe_open = uniforms.fringe < fringe_probability(p);
  return layer;
}

std::vector<LevelConfig> coupled_step(std::span<const LevelConfig> configs,
                                      const LayerUniforms& uniforms,
                                      std::span<const double> p_list) {
  if (configs.size() != p_list.size()) {
    throw ContractViolation("coupled_step: one configuration per p is required");
  }
  for (std::size_t k = 1; k < p_list.size(); ++k) {
    if (!(p_list[k - 1] < p_list[k])) throw ContractViolation("coupled_step: p_list must be strictly increasing");
  }
  std::vector<LevelConfig> out;
  out.reserve(p_list.size());
  for (std::size_t k = 0; k < p_list.size(); ++k) {
    out.push_back(step_forward(configs[k], threshold_layer(uniforms, p_list[k])));
  }
  return out;
}

std::vector<LevelConfig> coupled_step(const LevelConfig& config, const LayerUniforms& uniforms,
                                      std::span<const double> p_list) {
  const std::vector<LevelConfig> same(p_list.size(), config);
  return coupled_step(same, uniforms, p_list);
}

}  // namespace rightmost
