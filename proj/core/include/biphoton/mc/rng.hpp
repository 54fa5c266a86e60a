#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace biphoton::mc {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Philox4x64-10 block function (Salmon, Moraes, Dror, Shaw 2011).
/// Bit-compatible with Random123 and numpy.random.Philox.
PhiloxCounter philox4x64_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Deterministic random stream addressed by (seed, stream_id, domain).
///
/// The key is (seed, 0) and the counter is (block, 0, stream_id, domain).
/// Streams with different (stream_id, domain) therefore walk disjoint
/// regions of the counter space and cannot overlap for fewer than 2^64
/// blocks (2^66 draws).  Satisfies UniformRandomBitGenerator, so the
/// standard <random> distributions accept it.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0,
                     std::uint64_t domain = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n) (n > 0), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t domain() const noexcept { return domain_; }

  /// Number of 64-bit words consumed so far.
  std::uint64_t draws() const noexcept { return block_ * 4 - (4 - pos_); }

 private:
  void refill() noexcept;

  PhiloxKey key_;
  std::uint64_t stream_id_;
  std::uint64_t domain_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  unsigned pos_ = 4;
};

/// Domain tags keep the streams of different simulations disjoint even
/// when they share a seed.
namespace domain {
inline constexpr std::uint64_t calibration = 1;
inline constexpr std::uint64_t qkd = 2;
inline constexpr std::uint64_t double_slit = 3;
inline constexpr std::uint64_t user = 100;
}  // namespace domain

}  // namespace biphoton::mc
