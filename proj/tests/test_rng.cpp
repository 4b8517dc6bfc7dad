#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <set>

#include "funcest/rng.hpp"
#include "mc_stats.hpp"

using namespace funcest;

// Known-answer vectors of Philox4x32-10 (Random123 kat_vectors).
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(CounterRng, DeterministicPerSeed) {
  CounterRng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(CounterRng, UniformOpenIntervalAndMoments) {
  CounterRng rng(7);
  const auto st = mc_run(200000, [&](std::size_t) {
    const double u = rng.uniform();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    return u;
  });
  EXPECT_LE(std::abs(st.mean - 0.5), 4.0 * st.se);
  EXPECT_NEAR(st.var, 1.0 / 12.0, 0.02 / 12.0);
}

TEST(CounterRng, NormalMoments) {
  CounterRng rng(11);
  const auto st = mc_run(200000, [&](std::size_t) { return rng.normal(); });
  EXPECT_LE(std::abs(st.mean), 4.0 * st.se);
  EXPECT_NEAR(st.var, 1.0, 0.02);
}

TEST(CounterRng, BelowStaysInRange) {
  CounterRng rng(3);
  std::array<int, 7> counts{};
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(DeriveSeed, DistinctTuplesDistinctSeeds) {
  std::set<std::uint64_t> seen;
  for (int e = 0; e < 3; ++e) {
    for (std::int64_t n : {10, 100}) {
      for (std::size_t rep = 0; rep < 1000; ++rep) {
        seen.insert(derive_seed(5, {"gsm", e == 0 ? "plugin" : e == 1 ? "first_order" : "adaptive", n, rep}));
      }
    }
  }
  EXPECT_EQ(seen.size(), 6000u);
  EXPECT_EQ(derive_seed(1, {"a", 2}), derive_seed(1, {"a", 2}));
  EXPECT_NE(derive_seed(1, {"a", 2}), derive_seed(2, {"a", 2}));
  EXPECT_NE(derive_seed(1, {1, 2}), derive_seed(1, {2, 1}));
}
