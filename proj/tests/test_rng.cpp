#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "largevar/rng.hpp"

using largevar::RngStream;

TEST(Philox, KnownAnswerZero) {
  const auto out = RngStream::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (RngStream::Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = RngStream::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (RngStream::Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = RngStream::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (RngStream::Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RngStream, FirstBlockIsCounterZero) {
  RngStream rng(0, 0);
  EXPECT_EQ(rng(), 0x6627e8d5u);
  EXPECT_EQ(rng(), 0xe169c58du);
  EXPECT_EQ(rng(), 0xbc57ac4cu);
  EXPECT_EQ(rng(), 0x9b00dbd8u);
  const auto second = RngStream::generate({1, 0, 0, 0}, {0, 0});
  EXPECT_EQ(rng(), second[0]);
}

TEST(RngStream, Deterministic) {
  RngStream a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RngStream, StreamsDiffer) {
  RngStream a(42, 0), b(42, 1), c(43, 0);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    same_ab += x == b();
    same_ac += x == c();
  }
  EXPECT_LT(same_ab, 3);
  EXPECT_LT(same_ac, 3);
}

TEST(RngStream, UniformMoments) {
  RngStream rng(3, 0);
  const int n = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng() / 4294967296.0;
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum2 / n - mean * mean, 1.0 / 12, 0.002);
}

TEST(ReplicationStream, DistinctKeys) {
  std::set<std::uint32_t> firsts;
  for (std::uint64_t cell = 0; cell < 50; ++cell) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
      auto rng = largevar::replication_stream(1, cell, rep);
      firsts.insert(rng());
    }
  }
  EXPECT_EQ(firsts.size(), 1000u);
}
