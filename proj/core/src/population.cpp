#include "rightmost/population.hpp"

#include <cmath>
#include <string>

#include "rightmost/errors.hpp"
#include "rightmost/parallel.hpp"
#include "rightmost/rng.hpp"

namespace rightmost {

namespace {

__extension__ using Wide = unsigned __int128;

// Uniform index in [0, n) by multiply-shift.
std::size_t pick(SplitMix64& engine, std::size_t n) {
  return static_cast<std::size_t>((static_cast<Wide>(engine()) * n) >> 64);
}

void run_replicate(const SimParams& params, const Window& window, const LevelConfig& initial,
                   const std::vector<int>& checkpoints, const PopulationOptions& options,
                   const PopulationVisitor& visit, int rep) {
  const BernoulliWord bonds(params.p);
  const auto n = static_cast<std::size_t>(options.particles);
  const std::uint64_t rep_key = derive_key(family_key(params.seed, StreamFamily::Population),
                                           static_cast<std::uint64_t>(rep));
  const std::uint64_t resample_key = derive_key(family_key(params.seed, StreamFamily::Resampling),
                                                static_cast<std::uint64_t>(rep));
  std::vector<std::uint64_t> slot_keys(n);
  for (std::size_t i = 0; i < n; ++i) slot_keys[i] = derive_key(rep_key, i);

  std::vector<Particle> pop(n, Particle{initial, {}});
  double log_reach = 0.0;
  std::size_t next_cp = 0;
  auto visit_due = [&](int level) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == level) {
      visit(rep, next_cp, pop, log_reach);
      ++next_cp;
    }
  };
  visit_due(0);

  std::vector<std::size_t> alive;
  alive.reserve(n);
  const int last = checkpoints.empty() ? 0 : checkpoints.back();
  for (int k = 0; k < last; ++k) {
    alive.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t key = derive_key(slot_keys[i], static_cast<std::uint64_t>(k));
      Particle& part = pop[i];
      part.config = step_forward(part.config, generate_layer(bonds, window, k, key));
      if (part.config.lost_right) {
        throw WindowOverflow("occupied site left the window through the right edge at level " +
                             std::to_string(k + 1));
      }
      if (options.keep_keys) part.layer_keys.push_back(key);
      if (!part.config.empty()) alive.push_back(i);
    }
    if (alive.empty()) {
      throw NoData("every particle of replicate " + std::to_string(rep) + " died by level " +
                   std::to_string(k + 1));
    }
    log_reach += std::log(static_cast<double>(alive.size()) / static_cast<double>(n));
    if (alive.size() < n) {
      SplitMix64 engine(derive_key(resample_key, static_cast<std::uint64_t>(k)));
      const std::vector<std::size_t> donors = alive;
      std::size_t a = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (a < donors.size() && donors[a] == i) {
          ++a;
          continue;
        }
        pop[i] = pop[donors[pick(engine, donors.size())]];
      }
    }
    visit_due(k + 1);
  }
}

}  // namespace

void run_population(const SimParams& params, const Window& window, const LevelConfig& initial,
                    const std::vector<int>& checkpoints, const PopulationOptions& options,
                    const PopulationVisitor& visit) {
  params.validate();
  if (options.particles < 1) throw ConfigError("population needs at least one particle");
  if (options.replicates < 1) throw ConfigError("population needs at least one replicate");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || checkpoints[i] > params.n_max ||
        (i > 0 && checkpoints[i] < checkpoints[i - 1])) {
      throw ConfigError("checkpoints must be nondecreasing levels in 0..n_max");
    }
  }
  if (initial.level != 0 || initial.empty()) {
    throw ContractViolation("population must start from a nonempty level-0 configuration");
  }
  parallel_map<char>(options.replicates, options.threads, [&](std::int64_t rep) {
    run_replicate(params, window, initial, checkpoints, options, visit, static_cast<int>(rep));
    return char{0};
  });
}

}  // namespace rightmost
