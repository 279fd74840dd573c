#include "duks/rng.hpp"

#include <cmath>
#include <numbers>

namespace duks {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// 53-bit uniform strictly inside (0, 1).
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

GaussianPair standard_normal_pair(const NoiseKey& key, int mode, std::uint64_t step) noexcept {
  const Philox4x32::Counter counter = {
      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
      static_cast<std::uint32_t>(mode), static_cast<std::uint32_t>(key.path)};
  // The path's upper bits are folded into the key so that 2^32+ paths stay distinct.
  const Philox4x32::Key k = {static_cast<std::uint32_t>(key.seed),
                             static_cast<std::uint32_t>(key.seed >> 32) ^
                                 static_cast<std::uint32_t>(key.path >> 32)};
  const Philox4x32::Counter out = Philox4x32::generate(counter, k);
  const double u1 = to_open_unit(out[0], out[1]);
  const double u2 = to_open_unit(out[2], out[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace duks
