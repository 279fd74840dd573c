#pragma once

#include <array>
#include <cstdint>

namespace duks {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) noexcept;
};

/// Identifies one Monte-Carlo path's noise stream.
struct NoiseKey {
  std::uint64_t seed = 1;
  std::uint64_t path = 0;

  bool operator==(const NoiseKey&) const = default;
};

struct GaussianPair {
  double re;
  double im;
};

/// Two independent standard normals for (key, mode, step). The re/im roles
/// are the two Box-Muller outputs of one Philox block.
GaussianPair standard_normal_pair(const NoiseKey& key, int mode, std::uint64_t step) noexcept;

}  // namespace duks
