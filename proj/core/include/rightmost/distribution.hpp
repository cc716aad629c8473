#pragma once

#include <cstdint>
#include <map>

namespace rightmost {

/// What the keys of a DistributionTable encode.
///  - AnchoredState: truncated anchored configurations of depth `width`
///    sites; key bit k-1 is offset -2k (offset 0 is implicit).
///  - Cylinder: cylinder patterns of radius `width`; key bit k-1 is
///    coordinate -2k.
enum class Support { AnchoredState, Cylinder };

struct DistributionTable {
  Support support = Support::Cylinder;
  int width = 0;
  std::map<std::uint64_t, double> probs;

  double operator[](std::uint64_t key) const {
    const auto it = probs.find(key);
    return it == probs.end() ? 0.0 : it->second;
  }
  double total() const;
};

/// Half the L1 distance. Throws ContractViolation on differing encodings.
double tv_distance(const DistributionTable& a, const DistributionTable& b);

/// Rescales to total mass 1. Throws NoData for a table of zero mass.
DistributionTable normalized(DistributionTable table);

}  // namespace rightmost
