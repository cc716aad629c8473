#include <gtest/gtest.h>

#include "rightmost/site_set.hpp"

using namespace rightmost;

TEST(SiteSet, SetTestCount) {
  SiteSet s(130);
  s.set(0);
  s.set(64);
  s.set(129);
  EXPECT_EQ(s.count(), 3U);
  EXPECT_TRUE(s.test(64));
  EXPECT_FALSE(s.test(63));
  EXPECT_EQ(*s.highest(), 129U);
  EXPECT_EQ(*s.lowest(), 0U);
  EXPECT_EQ(*s.highest_below(129), 64U);
  s.set(64, false);
  EXPECT_EQ(s.count(), 2U);
}

TEST(SiteSet, FullConstructorTrimsTail) {
  const SiteSet s(70, true);
  EXPECT_EQ(s.count(), 70U);
  EXPECT_EQ(*s.highest(), 69U);
}

TEST(SiteSet, ShiftsCrossWordBoundaries) {
  SiteSet s(130);
  s.set(63);
  s.set(129);
  const SiteSet up = s.shifted_up();
  EXPECT_TRUE(up.test(64));
  EXPECT_EQ(up.count(), 1U);  // bit 129 falls off the top
  const SiteSet down = s.shifted_down();
  EXPECT_TRUE(down.test(62));
  EXPECT_TRUE(down.test(128));
  EXPECT_EQ(down.count(), 2U);
  SiteSet zero(10);
  zero.set(0);
  EXPECT_TRUE(zero.shifted_down().none());
}

TEST(SiteSet, AnyInIsInclusiveAndClamped) {
  SiteSet s(100);
  s.set(40);
  EXPECT_TRUE(s.any_in(40, 40));
  EXPECT_TRUE(s.any_in(-5, 40));
  EXPECT_TRUE(s.any_in(0, 1000));
  EXPECT_FALSE(s.any_in(41, 99));
  EXPECT_FALSE(s.any_in(0, 39));
  EXPECT_FALSE(s.any_in(200, 300));
}

TEST(SiteSet, ClearBelowAndSubset) {
  SiteSet a(80, true);
  a.clear_below(70);
  EXPECT_EQ(a.count(), 10U);
  EXPECT_EQ(*a.lowest(), 70U);
  const SiteSet full(80, true);
  EXPECT_TRUE(a.is_subset_of(full));
  EXPECT_FALSE(full.is_subset_of(a));
}

TEST(SiteSet, BitwiseOperators) {
  SiteSet a(10);
  SiteSet b(10);
  a.set(1);
  a.set(2);
  b.set(2);
  b.set(3);
  EXPECT_EQ((a & b).count(), 1U);
  EXPECT_EQ((a | b).count(), 3U);
}
