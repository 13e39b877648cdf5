#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "socs/rng.hpp"

using socs::Rng;
using socs::Stream;

TEST(Rng, SplitMixReferenceValues) {
  // SplitMix64 seeded with 0: first outputs of the reference generator.
  Rng r(0ULL);
  EXPECT_EQ(r(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(r(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(r(), 0x06c45d188009454fULL);
}

TEST(Rng, CounterAccessMatchesSequential) {
  Rng a(7, 3, Stream::Choice);
  Rng b(7, 3, Stream::Choice);
  for (int n = 0; n < 100; ++n) EXPECT_EQ(a(), b.at(n));
}

TEST(Rng, StreamsDifferByTrialAndTag) {
  Rng a(7, 3, Stream::Choice), b(7, 4, Stream::Choice), c(7, 3, Stream::Mark);
  EXPECT_NE(a.at(0), b.at(0));
  EXPECT_NE(a.at(0), c.at(0));
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(1, 0, Stream::Misc);
  double sum = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, BelowIsUnbiased) {
  Rng r(2, 0, Stream::Misc);
  std::vector<int> counts(6, 0);
  const int n = 600000;
  for (int k = 0; k < n; ++k) counts[r.below(6)]++;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  EXPECT_LT(chi2, 20.52);  // chi2(5) at alpha = 0.001
}

TEST(Rng, WorksWithStdShuffle) {
  Rng r(3, 0, Stream::Order);
  std::vector<int> v{1, 2, 3, 4, 5};
  std::shuffle(v.begin(), v.end(), r);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v, (std::vector<int>{1, 2, 3, 4, 5}));
}
