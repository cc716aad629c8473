#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rightmost/lattice.hpp"

namespace rightmost {

/// A configuration seen from its rightmost point.
///
/// `offsets` is strictly decreasing, starts at 0 and holds nonpositive even
/// integers; an empty list is the absorbing EMPTY state. A truncated-infinite
/// configuration additionally carries `reliable_depth`: offsets in
/// [reliable_depth, 0] are known exactly and every even site strictly below
/// reliable_depth is occupied.
struct AnchoredConfig {
  std::vector<int> offsets;
  std::optional<int> reliable_depth;

  static AnchoredConfig empty_state() { return {}; }
  bool is_empty() const noexcept { return offsets.empty(); }
  bool is_truncated_infinite() const noexcept { return reliable_depth.has_value(); }
  bool contains(int offset) const;

  friend bool operator==(const AnchoredConfig&, const AnchoredConfig&) = default;
};

/// Occupancy of the coordinates -2, -4, ..., -2r; bit k-1 is coordinate -2k.
struct CylinderPattern {
  int r = 0;
  std::uint64_t bits = 0;

  bool test(int k) const noexcept { return (bits >> (k - 1)) & 1U; }
  /// '0'/'1' string, coordinate -2 first.
  std::string to_string() const;
  static CylinderPattern parse(const std::string& text);

  friend bool operator==(const CylinderPattern&, const CylinderPattern&) = default;
};

struct InitialCondition {
  enum class Kind { Origin, Finite, Full };

  Kind kind = Kind::Origin;
  std::vector<int> offsets;  // Finite only

  static InitialCondition origin() { return {Kind::Origin, {}}; }
  static InitialCondition finite(std::vector<int> offsets);
  static InitialCondition full() { return {Kind::Full, {}}; }

  /// Accepts "origin", "full" or "finite:0,-2,-6".
  static InitialCondition parse(const std::string& text);
  std::string to_string() const;

  /// Depth in sites of the deepest finite offset (0 for ORIGIN and FULL).
  int depth_sites() const;
};

/// Level-0 configuration for `init` in `window`. FULL occupies every
/// tracked site at or left of 0 and uses the FULL-LEFT boundary unless
/// `truncate_full` is set, in which case the same sites form a finite set
/// with a Free boundary.
LevelConfig initial_config(const InitialCondition& init, const Window& window,
                           bool truncate_full = false);

/// Absorption time: level of the first EMPTY state, or nullopt if the chain
/// was still alive at the last simulated level.
struct SurvivalRecord {
  std::optional<int> absorbed_at;

  bool alive_at(int n) const noexcept { return !absorbed_at || *absorbed_at > n; }
};

AnchoredConfig anchor(const LevelConfig& config);

/// Throws ContractViolation for EMPTY input or when -2r lies below the
/// reliable depth of a truncated-infinite state.
CylinderPattern project(const AnchoredConfig& config, int r);

struct ZetaRun {
  std::vector<AnchoredConfig> states;  // states[n] = anchored config at level n
  SurvivalRecord survival;
};

/// Runs the anchored chain over every level of `env`. Throws WindowOverflow
/// if an occupied site leaves the window through the right edge, or through
/// the left edge of a Free-boundary run.
ZetaRun run_zeta_chain(const Environment& env, const InitialCondition& init);

/// Sorted offsets as a JSON array, EMPTY as null; truncated-infinite states
/// become {"offsets": [...], "occupied_below": d}.
std::string to_json(const AnchoredConfig& config);

}  // namespace rightmost
