#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace rightmost {

/// splitmix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream splitting function: key of child `index` under `parent`.
///
/// Every random stream in the library is addressed by a chain of
/// derive_key calls starting at the master seed, e.g. the bond layer of
/// level k in trial t is derive_key(derive_key(derive_key(seed, Trials), t), k).
/// Streams therefore never depend on scheduling order.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(parent ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Top-level stream families hanging off the master seed.
enum class StreamFamily : std::uint64_t {
  Trials = 1,
  ConeEscape = 2,
  Population = 3,
  Resampling = 4,
  Coupling = 5,
};

constexpr std::uint64_t family_key(std::uint64_t seed, StreamFamily family) noexcept {
  return derive_key(seed, static_cast<std::uint64_t>(family));
}

/// Counter-based splitmix64 engine. Construction is free, which matters
/// because a fresh stream is opened for every (trial, level) pair.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Uniform double in [0,1) with 53 random bits.
template <class Engine>
double uniform01(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Produces 64 i.i.d. Bernoulli(p) bits per call.
///
/// Lane j is 1 iff an implicit uniform U_j < p. U_j is revealed one binary
/// digit at a time (one engine word supplies that digit for all 64 lanes)
/// and compared against the exact binary expansion of p, so the result is
/// exact for any double p and needs about log2(64)+2 words on average.
class BernoulliWord {
 public:
  explicit BernoulliWord(double p);

  template <class Engine>
  std::uint64_t operator()(Engine& engine) const {
    if (always_one_) return ~std::uint64_t{0};
    std::uint64_t undecided = ~std::uint64_t{0};
    std::uint64_t result = 0;
    for (const auto digit : digits_) {
      const std::uint64_t u = engine();
      if (digit) {
        result |= undecided & ~u;
        undecided &= u;
      } else {
        undecided &= ~u;
      }
      if (undecided == 0) break;
    }
    return result;
  }

  double probability() const noexcept { return p_; }

 private:
  double p_;
  bool always_one_ = false;
  std::vector<std::uint8_t> digits_;
};

}  // namespace rightmost
