#include "funcest/rng.hpp"

#include "funcest/numeric.hpp"

namespace funcest {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::uint64_t CounterRng::next_u64() {
  if (used_ >= 4) {
    block_ = philox4x32(counter_, key_);
    for (auto& word : counter_) {
      if (++word != 0) break;
    }
    used_ = 0;
  }
  const std::uint64_t lo = block_[used_];
  const std::uint64_t hi = block_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double CounterRng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal() { return inverse_normal_cdf(uniform()); }

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Lemire-style rejection keeps the draw exactly uniform.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

SeedPart::SeedPart(std::string_view label) : value(fnv1a(label)) {}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<SeedPart> parts) {
  std::uint64_t h = splitmix64(base);
  for (const auto& part : parts) {
    h = splitmix64(h ^ splitmix64(part.value + 0x632BE59BD9B4E019ull));
  }
  return h;
}

}  // namespace funcest
