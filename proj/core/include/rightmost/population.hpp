#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rightmost/lattice.hpp"

namespace rightmost {

/// One member of a resampled population: its current configuration and
/// the stream key of every bond layer it has used so far, which is enough
/// to rebuild its whole environment with environment_from_keys.
struct Particle {
  LevelConfig config;
  std::vector<std::uint64_t> layer_keys;
};

struct PopulationOptions {
  std::int64_t particles = 1000;  // per replicate
  int replicates = 10;
  int threads = 1;
  bool keep_keys = false;  // record layer_keys for later environment rebuilds
};

/// Called once per replicate and checkpoint with the surviving population
/// at that level and the log of the estimated probability of reaching it.
using PopulationVisitor =
    std::function<void(int replicate, std::size_t checkpoint, std::span<const Particle> particles,
                       double log_reach)>;

/// Samples `initial` conditioned on staying nonempty up to each level.
///
/// Every replicate starts `particles` copies of `initial` and advances
/// them with independent bond layers. After each level the dead particles
/// are replaced by copies of uniformly chosen live ones; the product of
/// the live fractions estimates the probability of reaching that level.
/// `checkpoints` must be nondecreasing and at most params.n_max; level 0
/// is allowed. Replicates run in parallel; the visitor may run
/// concurrently for different replicates and must only touch state owned
/// by its replicate. Streams depend only on (seed, replicate, slot, level),
/// so results do not depend on `threads`.
/// Throws NoData if a whole replicate dies, WindowOverflow if a site
/// leaves through the right edge.
void run_population(const SimParams& params, const Window& window, const LevelConfig& initial,
                    const std::vector<int>& checkpoints, const PopulationOptions& options,
                    const PopulationVisitor& visit);

}  // namespace rightmost
