#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace largevar {

/// Philox4x32-10 counter-based generator.
///
/// A stream is addressed by a 64-bit key and a 64-bit stream id; within a
/// stream the low 64 bits of the counter enumerate 128-bit output blocks.
/// Streams (key, id) and (key, id') never overlap, so Monte Carlo
/// replication `i` can own stream `i` regardless of which worker runs it.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit RngStream(std::uint64_t key = 0, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      buffer_ = generate({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          static_cast<std::uint32_t>(stream_),
                          static_cast<std::uint32_t>(stream_ >> 32)},
                         key_);
      ++block_;
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  /// Raw Philox4x32-10 bijection.
  static Block generate(Block ctr, Key key) noexcept {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int pos_ = 4;
};

/// SplitMix64 finalizer; used to fold (seed, cell) pairs into a stream key.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stream for replication `rep` of experiment cell `cell` under base `seed`.
inline RngStream replication_stream(std::uint64_t seed, std::uint64_t cell, std::uint64_t rep) noexcept {
  return RngStream(mix64(seed ^ mix64(cell + 0x5851F42D4C957F2Dull)), rep);
}

}  // namespace largevar
