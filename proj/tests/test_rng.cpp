#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "assoc_clt/rng.hpp"

using namespace assoc_clt;

// Known-answer vectors of the reference Philox4x64-10.
TEST(Philox, KnownAnswers) {
  using B = Philox4x64::block_type;
  EXPECT_EQ(Philox4x64::generate({0, 0, 0, 0}, {0, 0}),
            (B{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}));
  EXPECT_EQ(Philox4x64::generate({1, 2, 3, 4}, {0x0123456789abcdefULL, 0xfedcba9876543210ULL}),
            (B{0x4f878b48427095e3ULL, 0xf1947f54cf4df5ecULL, 0xaec1fc9d8ef51164ULL, 0xeb9ddff6427540f1ULL}));
  const auto ones = ~std::uint64_t{0};
  EXPECT_EQ(Philox4x64::generate({ones, ones, ones, ones}, {ones, ones}),
            (B{0x87b092c3013fe90bULL, 0x438c3c67be8d0224ULL, 0x9cc7d7c69cd777b6ULL, 0xa09caebf594f0ba0ULL}));
}

TEST(RandomStream, Reproducible) {
  RandomStream a(StreamId{42, 3, 1}), b(StreamId{42, 3, 1});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, DistinctStreams) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t r = 0; r < 4; ++r) {
      for (std::uint64_t b = 0; b < 4; ++b) firsts.insert(RandomStream(StreamId{s, r, b}).next_u64());
    }
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(RandomStream, UnitIntervalAndMoments) {
  RandomStream rng(StreamId{7, 0, 0});
  const int n = 200000;
  double s = 0.0, s2 = 0.0, u_min = 1.0, sign = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_unit();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
    u_min = std::min(u_min, u);
    const double z = rng.next_normal();
    s += z;
    s2 += z * z;
    sign += rng.next_sign();
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(sign / n, 0.0, 5.0 / std::sqrt(n));
}

TEST(RandomStream, UniformRange) {
  RandomStream rng(StreamId{1, 2, 3});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_uniform(-2.0, 3.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 3.0);
  }
}
