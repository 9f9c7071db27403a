#pragma once

// Counter-based Philox4x64-10 streams. A stream is addressed by
// (seed, stream_id, substream) and a 64-bit block counter, so any draw can be
// regenerated without replaying its predecessors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>

namespace stablab {

using PhiloxBlock = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Ten rounds of Philox4x64 (Salmon et al. 2011 constants).
PhiloxBlock philox4x64_10(PhiloxBlock counter, PhiloxKey key) noexcept;

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t substream = 0) noexcept
      : seed_(seed), stream_id_(stream_id), substream_(substream) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint32_t substream() const noexcept { return substream_; }
  /// Number of 64-bit words drawn so far.
  std::uint64_t position() const noexcept { return position_; }
  void seek(std::uint64_t position) noexcept;

  /// Same seed and stream id, different substream, position 0.
  RngStream substream_of(std::uint32_t substream) const noexcept { return {seed_, stream_id_, substream}; }

  std::uint64_t next_u64() noexcept {
    if ((position_ >> 4) != buffered_group_) refill();
    return buffer_[position_++ & 15];
  }
  /// Uniform on the open interval (0, 1) with 52-bit resolution.
  double uniform() noexcept { return to_uniform(next_u64()); }
  /// Top 52 bits of a raw word mapped to the open interval (0, 1); the
  /// half-step offset keeps both endpoints out.
  static double to_uniform(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
  }
  /// Exp(1); one uniform.
  double exponential() noexcept;
  /// Two independent standard normals from two uniforms (Box-Muller).
  std::pair<double, double> normal_pair() noexcept;
  double normal() noexcept { return normal_pair().first; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint32_t substream_;
  std::uint64_t position_ = 0;
  static constexpr std::size_t kBlocks = 4;  // Philox blocks generated per refill
  std::array<std::uint64_t, 4 * kBlocks> buffer_{};
  std::uint64_t buffered_group_ = ~std::uint64_t{0};
};

}  // namespace stablab
