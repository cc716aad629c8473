#include "rightmost/site_set.hpp"

#include <algorithm>
#include <bit>

namespace rightmost {

SiteSet::SiteSet(std::size_t size, bool value)
    : size_(size), words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  trim();
}

void SiteSet::set(std::size_t i, bool value) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= bit;
  } else {
    words_[i >> 6] &= ~bit;
  }
}

bool SiteSet::any() const noexcept {
  return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
}

std::size_t SiteSet::count() const noexcept {
  std::size_t n = 0;
  for (const auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::optional<std::size_t> SiteSet::highest() const noexcept {
  for (std::size_t k = words_.size(); k-- > 0;) {
    if (words_[k] != 0) return k * 64 + 63 - static_cast<std::size_t>(std::countl_zero(words_[k]));
  }
  return std::nullopt;
}

std::optional<std::size_t> SiteSet::lowest() const noexcept {
  for (std::size_t k = 0; k < words_.size(); ++k) {
    if (words_[k] != 0) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
  }
  return std::nullopt;
}

std::optional<std::size_t> SiteSet::highest_below(std::size_t limit) const noexcept {
  limit = std::min(limit, size_);
  if (limit == 0) return std::nullopt;
  std::size_t k = (limit - 1) >> 6;
  const std::size_t top = (limit - 1) & 63;
  std::uint64_t w = words_[k];
  if (top != 63) w &= (std::uint64_t{1} << (top + 1)) - 1;
  while (true) {
    if (w != 0) return k * 64 + 63 - static_cast<std::size_t>(std::countl_zero(w));
    if (k == 0) return std::nullopt;
    w = words_[--k];
  }
}

bool SiteSet::any_in(std::ptrdiff_t lo, std::ptrdiff_t hi) const noexcept {
  lo = std::max<std::ptrdiff_t>(lo, 0);
  hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(size_) - 1);
  if (lo > hi) return false;
  for (auto k = static_cast<std::size_t>(lo) >> 6; k <= static_cast<std::size_t>(hi) >> 6; ++k) {
    std::uint64_t w = words_[k];
    const auto base = static_cast<std::ptrdiff_t>(k * 64);
    if (lo > base) w &= ~std::uint64_t{0} << (lo - base);
    if (hi < base + 63) w &= (std::uint64_t{1} << (hi - base + 1)) - 1;
    if (w != 0) return true;
  }
  return false;
}

bool SiteSet::is_subset_of(const SiteSet& other) const noexcept {
  for (std::size_t k = 0; k < words_.size(); ++k) {
    if ((words_[k] & ~other.words_[k]) != 0) return false;
  }
  return true;
}

SiteSet SiteSet::shifted_up() const {
  SiteSet out(size_);
  std::uint64_t carry = 0;
  for (std::size_t k = 0; k < words_.size(); ++k) {
    out.words_[k] = (words_[k] << 1) | carry;
    carry = words_[k] >> 63;
  }
  out.trim();
  return out;
}

SiteSet SiteSet::shifted_down() const {
  SiteSet out(size_);
  for (std::size_t k = 0; k < words_.size(); ++k) {
    const std::uint64_t next = k + 1 < words_.size() ? words_[k + 1] : 0;
    out.words_[k] = (words_[k] >> 1) | (next << 63);
  }
  return out;
}

void SiteSet::clear_below(std::size_t first) noexcept {
  first = std::min(first, size_);
  for (std::size_t k = 0; k < (first >> 6); ++k) words_[k] = 0;
  if ((first & 63) != 0) words_[first >> 6] &= ~std::uint64_t{0} << (first & 63);
}

SiteSet& SiteSet::operator&=(const SiteSet& other) noexcept {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= other.words_[k];
  return *this;
}

SiteSet& SiteSet::operator|=(const SiteSet& other) noexcept {
  for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= other.words_[k];
  return *this;
}

void SiteSet::trim() noexcept {
  if (words_.empty()) return;
  const std::size_t used = size_ & 63;
  if (used != 0) words_.back() &= (std::uint64_t{1} << used) - 1;
}

}  // namespace rightmost
