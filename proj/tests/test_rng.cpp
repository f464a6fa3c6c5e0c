#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "smc/rng.hpp"

namespace {

TEST(Rng, SameSeedSameSequence) {
  smc::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, DifferentSeedsDiffer) {
  smc::Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a() == b();
  EXPECT_EQ(same, 0);
}

TEST(Rng, DeriveIgnoresParentPosition) {
  smc::Rng a(7), b(7);
  for (int i = 0; i < 13; ++i) b();
  smc::Rng ca = a.derive({3, 5, 8}), cb = b.derive({3, 5, 8});
  for (int i = 0; i < 20; ++i) ASSERT_EQ(ca(), cb());
}

TEST(Rng, DerivedStreamsAreDistinct) {
  smc::Rng root(9);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t t = 0; t < 50; ++t)
    for (std::uint64_t k = 0; k < 50; ++k) firsts.insert(root.derive({2, t, k})());
  EXPECT_EQ(firsts.size(), 2500u);
  // Path order matters.
  EXPECT_NE(root.derive({1, 2})(), root.derive({2, 1})());
  EXPECT_NE(root.derive({1})(), root.derive({1, 0})());
}

TEST(Rng, UniformOpenInterval) {
  smc::Rng r(11);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of U(0,1) has sd 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

}  // namespace
