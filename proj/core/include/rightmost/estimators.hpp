#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>

#include "rightmost/distribution.hpp"

namespace rightmost {

/// Key -> count tally. Merging is associative and commutative.
struct Counter {
  std::map<std::uint64_t, std::int64_t> counts;
  std::int64_t total = 0;

  void add(std::uint64_t key, std::int64_t n = 1) {
    counts[key] += n;
    total += n;
  }
  std::int64_t operator[](std::uint64_t key) const {
    const auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }
  void merge(const Counter& other);
};

/// counts / total. Throws NoData on an empty counter.
DistributionTable to_distribution(const Counter& counter, Support support, int width);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_ci(std::int64_t count, std::int64_t total, double z = 1.96);

struct DecayPoint {
  double x = 0.0;
  double p_hat = 0.0;
  std::int64_t count = 0;
};

/// Least-squares line through (x, log p_hat).
struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  double slope_se = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  int points = 0;
};

inline constexpr std::int64_t kDefaultMinCount = 30;

/// Fits only points with count >= min_count and p_hat > 0. Throws NoData
/// when fewer than three points qualify.
DecayFit fit_log_linear(std::span<const DecayPoint> points,
                        std::int64_t min_count = kDefaultMinCount);

}  // namespace rightmost
