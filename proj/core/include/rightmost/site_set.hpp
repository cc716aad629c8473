#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rightmost {

/// Fixed-size bit vector over the tracked sites of one level. Bit i is the
/// i-th tracked site counted from the left edge of the window.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::size_t size, bool value = false);

  std::size_t size() const noexcept { return size_; }
  std::size_t word_count() const noexcept { return words_.size(); }
  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value = true) noexcept;

  bool any() const noexcept;
  bool none() const noexcept { return !any(); }
  std::size_t count() const noexcept;
  std::optional<std::size_t> highest() const noexcept;
  std::optional<std::size_t> lowest() const noexcept;

  /// Highest set index strictly below `limit`.
  std::optional<std::size_t> highest_below(std::size_t limit) const noexcept;
  /// True if any bit in [lo, hi] (inclusive, clamped to the set) is set.
  bool any_in(std::ptrdiff_t lo, std::ptrdiff_t hi) const noexcept;

  bool is_subset_of(const SiteSet& other) const noexcept;

  /// Bit i of the result is bit i-1 of *this.
  SiteSet shifted_up() const;
  /// Bit i of the result is bit i+1 of *this.
  SiteSet shifted_down() const;

  /// Keeps only bits at indices >= first.
  void clear_below(std::size_t first) noexcept;

  SiteSet& operator&=(const SiteSet& other) noexcept;
  SiteSet& operator|=(const SiteSet& other) noexcept;
  friend SiteSet operator&(SiteSet a, const SiteSet& b) noexcept { return a &= b; }
  friend SiteSet operator|(SiteSet a, const SiteSet& b) noexcept { return a |= b; }
  friend bool operator==(const SiteSet&, const SiteSet&) = default;

  /// Clears the unused high bits of the last word.
  void trim() noexcept;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace rightmost
