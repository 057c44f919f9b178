#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace soaksim {

// Philox4x32-10 block function (Salmon et al., SC 2011): a 128-bit counter and
// a 64-bit key map to 128 pseudorandom bits through ten bumped-key rounds.
namespace philox {

inline constexpr std::uint32_t kW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kM4x32B = 0xCD9E8D57u;

struct Block {
  std::uint32_t w[4];
};

inline Block block(std::uint32_t c0, std::uint32_t c1, std::uint32_t c2,
                   std::uint32_t c3, std::uint32_t k0, std::uint32_t k1) noexcept {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM4x32A) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM4x32B) * c2;
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    if (round != 9) {
      k0 += kW32A;
      k1 += kW32B;
    }
  }
  return {{c0, c1, c2, c3}};
}

}  // namespace philox

// One independent substream per (seed, stream id, step index) tuple. The draw
// sequence inside a tuple is fixed and distinct tuples never share Philox
// blocks, so results are identical for any thread count or scheduling order.
// Step indices are used modulo 2^32; runs stay far below 2^32 steps.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_id,
                std::uint64_t step_index) noexcept
      : c0_(static_cast<std::uint32_t>(stream_id)),
        c1_(static_cast<std::uint32_t>(stream_id >> 32)),
        c2_(static_cast<std::uint32_t>(step_index)),
        k0_(static_cast<std::uint32_t>(seed)),
        k1_(static_cast<std::uint32_t>(seed >> 32)) {}

  // Uniform strictly inside (0, 1); resolution 2^-32.
  double uniform01() noexcept {
    return (static_cast<double>(next_u32()) + 0.5) * 0x1p-32;
  }

  // Standard normal via Box-Muller; the second member of each pair is cached.
  double normal() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint32_t next_u32() noexcept {
    if (avail_ == 0) {
      buf_ = philox::block(c0_, c1_, c2_, block_, k0_, k1_);
      ++block_;
      avail_ = 4;
    }
    return buf_.w[4 - avail_--];
  }

  std::uint32_t c0_;
  std::uint32_t c1_;
  std::uint32_t c2_;
  std::uint32_t block_ = 0;
  std::uint32_t k0_;
  std::uint32_t k1_;
  philox::Block buf_{};
  int avail_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream id reserved for the release sampler; particle ids count up from 0
// and can never collide with it.
inline constexpr std::uint64_t kReleaseStreamId = 0xFFFFFFFFFFFFFFFFull;

}  // namespace soaksim
