#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "rightmost/errors.hpp"
#include "rightmost/lattice.hpp"

using namespace rightmost;

namespace {

SimParams small_params(double p = 0.5, int n_max = 4, int width = 10, std::uint64_t seed = 1) {
  return SimParams{p, n_max, width, seed};
}

BondLayer closed_layer(const Window& w, int level) {
  const auto n = static_cast<std::size_t>(w.width);
  return BondLayer{level, w.origin(level), SiteSet(n), SiteSet(n), false};
}

void open_bond(BondLayer& layer, const Window& w, int x, char dir) {
  const auto i = *w.index(layer.level, x);
  (dir == 'L' ? layer.left_open : layer.right_open).set(i);
}

std::set<int> sites(const LevelConfig& c) {
  const auto v = c.positions();
  return {v.begin(), v.end()};
}

LevelConfig at(const Window& w, int level, std::initializer_list<int> xs,
               BoundaryMode mode = BoundaryMode::Free) {
  const std::vector<int> v(xs);
  return LevelConfig::from_positions(level, w.origin(level), static_cast<std::size_t>(w.width), v, mode);
}

}  // namespace

TEST(SimParams, Validation) {
  EXPECT_NO_THROW(small_params().validate());
  EXPECT_THROW((SimParams{-0.1, 4, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((SimParams{1.1, 4, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((SimParams{0.5, 0, 10, 0}.validate()), ConfigError);
  EXPECT_THROW((SimParams{0.5, 4, 1, 0}.validate()), ConfigError);
}

TEST(Window, GeometryAlternatesParity) {
  const Window w = window_for(small_params());
  EXPECT_EQ(w.base_origin % 2, 0);
  EXPECT_EQ(w.origin(1), w.origin(0) + 1);
  EXPECT_TRUE(w.index(0, 0).has_value());
  EXPECT_FALSE(w.index(0, 1).has_value());
  EXPECT_TRUE(w.index(1, 1).has_value());
  // Right margin covers n_max levels of +1 moves.
  EXPECT_TRUE(w.index(4, 4).has_value());
  EXPECT_THROW(window_for(SimParams{0.5, 40, 10, 0}), ConfigError);
}

TEST(Environment, DegenerateProbabilities) {
  for (const double p : {0.0, 1.0}) {
    const Environment env = sample_environment(small_params(p, 6, 70), 3);
    ASSERT_EQ(env.levels(), 6);
    for (const auto& layer : env.layers) {
      const std::size_t expect = p == 0.0 ? 0 : 70;
      EXPECT_EQ(layer.left_open.count(), expect);
      EXPECT_EQ(layer.right_open.count(), expect);
      EXPECT_EQ(layer.fringe_open, p == 1.0);
    }
  }
}

TEST(Environment, OpenFractionAtHalf) {
  std::int64_t open = 0;
  std::int64_t total = 0;
  for (std::int64_t t = 0; total < 1000000; ++t) {
    const Environment env = sample_environment(small_params(0.5, 50, 256, 11), t);
    for (const auto& layer : env.layers) {
      open += static_cast<std::int64_t>(layer.left_open.count() + layer.right_open.count());
      total += 512;
    }
  }
  EXPECT_NEAR(static_cast<double>(open) / static_cast<double>(total), 0.5, 0.002);
}

TEST(Environment, RegenerationIsBitIdentical) {
  const auto params = small_params(0.4, 20, 100, 77);
  const Environment a = sample_environment(params, 5);
  const Environment b = sample_environment(params, 5);
  const Environment c = sample_environment(params, 6);
  bool differs = false;
  for (int k = 0; k < 20; ++k) {
    EXPECT_EQ(a.layer(k).left_open, b.layer(k).left_open);
    EXPECT_EQ(a.layer(k).right_open, b.layer(k).right_open);
    EXPECT_EQ(a.layer(k).fringe_open, b.layer(k).fringe_open);
    differs = differs || !(a.layer(k).left_open == c.layer(k).left_open);
  }
  EXPECT_TRUE(differs);
  EXPECT_THROW(sample_environment(params, -1), ContractViolation);
}

TEST(Environment, RebuildFromKeysMatchesTrialStream) {
  const auto params = small_params(0.4, 8, 30, 5);
  const Environment env = sample_environment(params, 9);
  std::vector<std::uint64_t> keys;
  for (int k = 0; k < 8; ++k) keys.push_back(trial_layer_key(params.seed, 9, k));
  const Environment again = environment_from_keys(params, env.window, keys);
  for (int k = 0; k < 8; ++k) EXPECT_EQ(env.layer(k).right_open, again.layer(k).right_open);
}

TEST(StepForward, BothClosedDies) {
  const Window w = window_for(small_params());
  const LevelConfig next = step_forward(at(w, 0, {0}), closed_layer(w, 0));
  EXPECT_TRUE(next.empty());
  EXPECT_EQ(next.level, 1);
}

TEST(StepForward, BothOpenSplits) {
  const Window w = window_for(small_params());
  BondLayer layer = closed_layer(w, 0);
  open_bond(layer, w, 0, 'L');
  open_bond(layer, w, 0, 'R');
  EXPECT_EQ(sites(step_forward(at(w, 0, {0}), layer)), (std::set<int>{-1, 1}));
}

TEST(StepForward, FourOutcomeLawAtHalf) {
  const Window w = window_for(small_params());
  std::map<std::set<int>, int> outcomes;
  for (int mask = 0; mask < 4; ++mask) {
    BondLayer layer = closed_layer(w, 0);
    if (mask & 1) open_bond(layer, w, 0, 'L');
    if (mask & 2) open_bond(layer, w, 0, 'R');
    ++outcomes[sites(step_forward(at(w, 0, {0}), layer))];
  }
  // Each bond pattern has probability 1/4 at p = 1/2.
  EXPECT_EQ(outcomes.size(), 4U);
  for (const auto& [set, n] : outcomes) EXPECT_EQ(n, 1);
}

TEST(StepForward, OddLevelStepsBack) {
  const Window w = window_for(small_params());
  BondLayer layer = closed_layer(w, 1);
  open_bond(layer, w, 1, 'L');
  open_bond(layer, w, 3, 'R');
  EXPECT_EQ(sites(step_forward(at(w, 1, {1, 3}), layer)), (std::set<int>{0, 4}));
}

TEST(StepForward, LevelMismatchIsContractViolation) {
  const Window w = window_for(small_params());
  EXPECT_THROW(step_forward(at(w, 0, {0}), closed_layer(w, 1)), ContractViolation);
}

TEST(StepForward, EdgeLossesAreFlagged) {
  const Window w = window_for(small_params());
  BondLayer even = closed_layer(w, 0);
  open_bond(even, w, w.base_origin, 'L');
  EXPECT_TRUE(step_forward(at(w, 0, {w.base_origin}), even).lost_left);
  const int right_odd = w.position(1, static_cast<std::size_t>(w.width - 1));
  BondLayer odd = closed_layer(w, 1);
  open_bond(odd, w, right_odd, 'R');
  EXPECT_TRUE(step_forward(at(w, 1, {right_odd}), odd).lost_right);
}

TEST(StepForward, FullLeftInjectsAtLeftEdge) {
  const Window w = window_for(small_params());
  BondLayer layer = closed_layer(w, 0);
  layer.fringe_open = true;
  const LevelConfig next = step_forward(at(w, 0, {0}, BoundaryMode::FullLeft), layer);
  EXPECT_EQ(sites(next), (std::set<int>{w.origin(1)}));
  EXPECT_FALSE(next.lost_left);
}

TEST(ForwardReach, AllOpenCone) {
  const auto params = small_params(0.5, 4, 12);
  const Window w = window_for(params);
  const Environment env = uniform_environment(params, w, true);
  const auto levels = forward_reach(env, at(w, 0, {0}), 0, 2);
  ASSERT_EQ(levels.size(), 3U);
  EXPECT_EQ(sites(levels[2]), (std::set<int>{-2, 0, 2}));
}

TEST(ForwardReach, AllClosedDiesAtOnce) {
  const auto params = small_params(0.5, 4, 12);
  const Window w = window_for(params);
  const Environment env = uniform_environment(params, w, false);
  const auto levels = forward_reach(env, at(w, 0, {0, -2}), 0, 4);
  for (std::size_t k = 1; k < levels.size(); ++k) EXPECT_TRUE(levels[k].empty());
}

TEST(ForwardReach, HandcraftedSinglePath) {
  const auto params = small_params(0.5, 3, 12);
  const Window w = window_for(params);
  Environment env = uniform_environment(params, w, false);
  open_bond(env.layers[0], w, 0, 'R');
  open_bond(env.layers[1], w, 1, 'L');
  const auto levels = forward_reach(env, at(w, 0, {0}), 0, 2);
  EXPECT_EQ(sites(levels[1]), (std::set<int>{1}));
  EXPECT_EQ(sites(levels[2]), (std::set<int>{0}));
  EXPECT_THROW(forward_reach(env, at(w, 0, {0}), 0, 5), ContractViolation);
}

TEST(BackwardReach, AllOpenAndAllClosed) {
  const auto params = small_params(0.5, 5, 12);
  const Window w = window_for(params);
  const auto open = backward_reach(uniform_environment(params, w, true), 5);
  for (const auto& level : open) EXPECT_EQ(level.occupancy.count(), 12U);
  const auto closed = backward_reach(uniform_environment(params, w, false), 5);
  for (int k = 0; k < 5; ++k) EXPECT_TRUE(closed[static_cast<std::size_t>(k)].empty());
  EXPECT_EQ(closed[5].occupancy.count(), 12U);
}

TEST(BackwardReach, AgreesWithPerSiteForwardOracle) {
  const auto params = small_params(0.55, 9, 24, 3);
  for (std::int64_t t = 0; t < 40; ++t) {
    const Environment env = sample_environment(params, t);
    const int n = 9;
    const auto back = backward_reach(env, n);
    for (int k = 0; k <= n; ++k) {
      for (std::size_t i = 0; i < static_cast<std::size_t>(env.window.width); ++i) {
        const int x = env.window.position(k, i);
        LevelConfig one = LevelConfig::from_positions(k, env.window.origin(k), 24, std::vector<int>{x});
        const bool reaches = !forward_reach(env, one, k, n).back().empty();
        EXPECT_EQ(back[static_cast<std::size_t>(k)].occupancy.test(i), reaches)
            << "trial " << t << " level " << k << " site " << x;
      }
    }
  }
}

TEST(Lattice, ParityInvariantHolds) {
  const auto params = small_params(0.6, 30, 64, 8);
  for (std::int64_t t = 0; t < 20; ++t) {
    const Environment env = sample_environment(params, t);
    const auto levels = forward_reach(env, at(env.window, 0, {0, -2, -6}), 0, 30);
    for (const auto& c : levels) {
      for (const int x : c.positions()) EXPECT_EQ(((x + c.level) % 2 + 2) % 2, 0);
    }
  }
}

TEST(Lattice, FreeIsContainedInFullLeft) {
  const auto params = small_params(0.45, 40, 48, 21);
  for (std::int64_t t = 0; t < 50; ++t) {
    const Environment env = sample_environment(params, t);
    LevelConfig free_c = at(env.window, 0, {0, -2, -4});
    LevelConfig full_c = at(env.window, 0, {0, -2, -4}, BoundaryMode::FullLeft);
    for (int k = 0; k < 40; ++k) {
      free_c = step_forward(free_c, env.layer(k));
      full_c = step_forward(full_c, env.layer(k));
      ASSERT_TRUE(free_c.occupancy.is_subset_of(full_c.occupancy));
    }
  }
}

TEST(CoupledStep, ThresholdsAtSharedUniforms) {
  const Window w = window_for(small_params());
  LayerUniforms u{0, w.origin(0), std::vector<double>(10, 0.4), std::vector<double>(10, 0.4), 0.4};
  const double ps[] = {0.3, 0.5};
  const auto out = coupled_step(at(w, 0, {0}), u, ps);
  EXPECT_TRUE(out[0].empty());
  EXPECT_EQ(sites(out[1]), (std::set<int>{-1, 1}));
}

TEST(CoupledStep, RejectsUnsortedProbabilities) {
  const Window w = window_for(small_params());
  const LayerUniforms u = sample_uniforms(w, 0, 1);
  const double ps[] = {0.5, 0.3};
  EXPECT_THROW(coupled_step(at(w, 0, {0}), u, ps), ContractViolation);
}

TEST(CoupledStep, NestedOccupancyAlongRuns) {
  const auto params = small_params(0.5, 30, 64, 4);
  const Window w = window_for(params);
  const double ps[] = {0.3, 0.5};
  for (std::uint64_t t = 0; t < 300; ++t) {
    std::vector<LevelConfig> cfg(2, at(w, 0, {0, -2, -4}));
    for (int k = 0; k < 30; ++k) {
      cfg = coupled_step(cfg, sample_uniforms(w, k, derive_key(t, static_cast<std::uint64_t>(k))), ps);
      ASSERT_TRUE(cfg[0].occupancy.is_subset_of(cfg[1].occupancy));
    }
  }
}
