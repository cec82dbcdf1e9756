#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ablmc {

namespace detail {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// one call encrypts a 128-bit counter under a 64-bit key.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
           std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Uniform double strictly inside (0, 1) from 64 random bits.
inline double bits_to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t b = (std::uint64_t(hi) << 32) | lo;
  return (double(b >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Reproducible per-sample stream of standard normal draws. The k-th draw is
/// a pure function of (seed, level, sample_index, k): a Philox block keyed by
/// (seed, level) encrypts the counter (sample_index, k/2) and the resulting
/// uniforms feed a Box-Muller pair. Results are therefore identical for any
/// worker count or sampling order.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint32_t level, std::uint64_t sample_index)
      : sample_(sample_index) {
    const std::uint64_t k = detail::splitmix64(detail::splitmix64(seed) ^ level);
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
  }

  double next() { return normal_at(cursor_++); }

  /// Stateless access to the k-th draw of this stream.
  double normal_at(std::uint64_t k) const {
    const std::uint64_t block = k >> 1;
    if (block != cached_block_) {
      const auto w = detail::philox4x32(
          {std::uint32_t(block), std::uint32_t(block >> 32),
           std::uint32_t(sample_), std::uint32_t(sample_ >> 32)},
          key_);
      const double u1 = detail::bits_to_unit(w[0], w[1]);
      const double u2 = detail::bits_to_unit(w[2], w[3]);
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double th = 2.0 * std::numbers::pi * u2;
      cached_z_[0] = r * std::cos(th);
      cached_z_[1] = r * std::sin(th);
      cached_block_ = block;
    }
    return cached_z_[k & 1];
  }

  std::uint64_t cursor() const { return cursor_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t sample_;
  std::uint64_t cursor_ = 0;
  mutable std::uint64_t cached_block_ = ~std::uint64_t(0);
  mutable std::array<double, 2> cached_z_{};
};

/// Coarse-level noise for the symplectic Euler coupling:
/// S_c (S0_f xi0 + S1_f xi1) / sqrt(2). With all signs +1 this is the plain
/// Brownian-bridge combination.
inline double coarse_noise_se(double xi0, double xi1, int s0_fine, int s1_fine,
                              int s_coarse) {
  return s_coarse * (s0_fine * xi0 + s1_fine * xi1) / std::numbers::sqrt2;
}

/// Coarse-level noise for the geometric Langevin (and BAOAB) coupling:
/// S_c (e^{-lambda h} S0_f xi0 + S1_f xi1) / sqrt(e^{-2 lambda h} + 1).
/// lambda is evaluated at the fine path's position at the start of the
/// two-fine-step window; the combination has unit variance for any lambda h.
inline double coarse_noise_gl(double xi0, double xi1, double lambda_xn, double h,
                              int s0_fine, int s1_fine, int s_coarse) {
  const double e = std::exp(-lambda_xn * h);
  return s_coarse * (e * (s0_fine * xi0) + s1_fine * xi1) / std::sqrt(e * e + 1.0);
}

}  // namespace ablmc
