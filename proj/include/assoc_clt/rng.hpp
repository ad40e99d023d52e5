#pragma once

// Counter-based random numbers: Philox4x64-10 (Salmon et al., SC'11).
//
// A stream is addressed by (seed, replicate, block); the seed is the key and
// the remaining counter words carry the stream address and a draw counter, so
// any draw of any stream is computable independently of every other.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace assoc_clt {

class Philox4x64 {
 public:
  using block_type = std::array<std::uint64_t, 4>;
  using key_type = std::array<std::uint64_t, 2>;

  static block_type generate(block_type ctr, key_type key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const auto p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
      const auto p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64), lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64), lo1 = static_cast<std::uint64_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
};

struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::uint64_t block = 0;
};

/// Sequential draws from one stream. Counter layout: (draw, replicate, block, 0).
class RandomStream {
 public:
  explicit RandomStream(StreamId id) noexcept : id_(id) {}

  std::uint64_t next_u64() noexcept {
    if (pos_ == 4) {
      buf_ = Philox4x64::generate({draw_, id_.replicate, id_.block, 0}, {id_.seed, 0});
      ++draw_;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  /// Uniform on (0, 1], 53 bits.
  double next_unit() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Uniform on [a, b).
  double next_uniform(double a, double b) noexcept {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }

  /// Standard normal by Box-Muller; the second variate of each pair is kept.
  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// +1 or -1 with probability 1/2.
  double next_sign() noexcept { return (next_u64() >> 63) ? 1.0 : -1.0; }

  [[nodiscard]] const StreamId& id() const noexcept { return id_; }

 private:
  StreamId id_;
  std::uint64_t draw_ = 0;
  Philox4x64::block_type buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace assoc_clt
