#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <concepts>

namespace funcest {

/// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator: the 64-bit seed is the Philox key, the counter
/// walks from zero. Streams with distinct seeds are independent, and the
/// period of a single stream is 2^128 blocks.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) : key_{static_cast<std::uint32_t>(seed),
                                                 static_cast<std::uint32_t>(seed >> 32)} {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform();
  /// Standard normal draw by inversion.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  // UniformRandomBitGenerator interface.
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
  std::uint64_t operator()() { return next_u64(); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

/// Component of a seed-derivation tuple: an integer or a label.
struct SeedPart {
  template <std::integral T>
  SeedPart(T v) : value(static_cast<std::uint64_t>(v)) {}  // NOLINT(implicit)
  SeedPart(std::string_view label);                          // NOLINT(implicit)
  SeedPart(const char* label) : SeedPart(std::string_view(label)) {}  // NOLINT(implicit)
  SeedPart(const std::string& label) : SeedPart(std::string_view(label)) {}  // NOLINT(implicit)
  std::uint64_t value;
};

/// Hashes (base, parts...) into a 64-bit stream seed. Distinct tuples give
/// distinct, well-mixed seeds; the mapping is platform independent.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<SeedPart> parts);

}  // namespace funcest
