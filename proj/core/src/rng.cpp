#include "stablab/rng.hpp"

#include <cmath>
#include <numbers>

namespace stablab {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

__extension__ using Wide = unsigned __int128;

inline void mul_wide(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
  const Wide p = static_cast<Wide>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

PhiloxBlock philox4x64_10(PhiloxBlock c, PhiloxKey k) noexcept {
  std::uint64_t c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3];
  std::uint64_t k0 = k[0], k1 = k[1];
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mul_wide(kMul0, c0, hi0, lo0);
    mul_wide(kMul1, c2, hi1, lo1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

void RngStream::seek(std::uint64_t position) noexcept { position_ = position; }

void RngStream::refill() noexcept {
  // Counter (block, substream, 0, 0), key (seed, stream_id). Independent blocks
  // interleave, hiding the multiply latency of a single chain.
  const std::uint64_t group = position_ >> 4;
  std::uint64_t c0[kBlocks], c1[kBlocks], c2[kBlocks], c3[kBlocks];
  for (std::size_t b = 0; b < kBlocks; ++b) {
    c0[b] = group * kBlocks + b;
    c1[b] = substream_;
    c2[b] = 0;
    c3[b] = 0;
  }
  std::uint64_t k0 = seed_, k1 = stream_id_;
#pragma GCC unroll 10
  for (int round = 0; round < 10; ++round) {
    for (std::size_t b = 0; b < kBlocks; ++b) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mul_wide(kMul0, c0[b], hi0, lo0);
      mul_wide(kMul1, c2[b], hi1, lo1);
      c0[b] = hi1 ^ c1[b] ^ k0;
      c1[b] = lo1;
      c2[b] = hi0 ^ c3[b] ^ k1;
      c3[b] = lo0;
    }
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  for (std::size_t b = 0; b < kBlocks; ++b) {
    buffer_[4 * b] = c0[b];
    buffer_[4 * b + 1] = c1[b];
    buffer_[4 * b + 2] = c2[b];
    buffer_[4 * b + 3] = c3[b];
  }
  buffered_group_ = group;
}

double RngStream::exponential() noexcept { return -std::log(uniform()); }

std::pair<double, double> RngStream::normal_pair() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace stablab
