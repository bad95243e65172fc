#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace nli {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
/// pure function of (key, counter), so any draw can be regenerated in any
/// order on any worker.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  std::array<std::uint32_t, 2> key_;
};

/// Address of one complex Gaussian draw.
struct DrawKey {
  std::uint64_t trial = 0;
  std::uint32_t stream = 0;  // polarization, variable, source...
  std::uint32_t index = 0;   // line / component
};

/// Zero-mean circular complex Gaussian with E|z|^2 = 1, i.e. (n1 + j n2)/sqrt(2)
/// with n1, n2 independent standard normals (Box-Muller on one Philox block).
inline std::complex<double> circular_normal(const Philox4x32& rng, DrawKey key) {
  const auto out = rng({static_cast<std::uint32_t>(key.trial),
                        static_cast<std::uint32_t>(key.trial >> 32), key.stream, key.index});
  const std::uint64_t w0 = (std::uint64_t{out[0]} << 32) | out[1];
  const std::uint64_t w1 = (std::uint64_t{out[2]} << 32) | out[3];
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(w0 >> 11) + 0.5) * kScale;  // (0, 1)
  const double u2 = static_cast<double>(w1 >> 11) * kScale;          // [0, 1)
  // sqrt(-2 ln u1) / sqrt(2)
  const double r = std::sqrt(-std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace nli
