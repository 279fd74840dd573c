#pragma once

// Independent reference formulas used only by the tests. Nothing here calls
// into the library's numerics.

#include <complex>
#include <map>

namespace duks::testing {

using C = std::complex<double>;

inline constexpr double kLambda2 = -225.0;
inline constexpr double kLambda4 = -11025.0;
inline constexpr double kLambda6 = -893025.0;

struct Forcing {
  double z0 = 0.0;  // Zhat_0 is real
  C z1, z2, z3, z4, z6;
};

struct Rates {
  C da1, da3;
};

// The eliminated amplitude system, transcribed term by term from the
// expanded text with Zhat_{-k} = conj(Zhat_k), A_{-k} = conj(A_k).
inline Rates expanded_amplitude_rhs(C a1, C a3, const Forcing& f) {
  const C i{0.0, 1.0};
  const C y1 = f.z1 + a1, y3 = f.z3 + a3;
  const C y1m = std::conj(f.z1) + std::conj(a1), y3m = std::conj(f.z3) + std::conj(a3);
  const C z2m = std::conj(f.z2);

  const C da1 = a1 + f.z1 +
                2.0 * i * (f.z2 - (1.0 / kLambda2) * (2.0 * i * y1 * y1 + 4.0 * i * y3 * y1m)) * y1m +
                2.0 * i * f.z0 * y1 +
                2.0 * i * y3 * (z2m - (1.0 / kLambda2) * (-2.0 * i * y1m * y1m - 4.0 * i * y3m * y1)) +
                2.0 * i * (f.z4 - (8.0 * i / kLambda4) * y3 * y1) * y3m;

  const C da3 = a3 + f.z3 +
                6.0 * i * (f.z2 - (1.0 / kLambda2) * (2.0 * i * y1 * y1 + 4.0 * i * y3 * y1m)) * y1 +
                6.0 * i * f.z0 * y3 +
                6.0 * i * (f.z6 - (6.0 * i / kLambda6) * y3 * y3) * y3m +
                6.0 * i * (f.z4 - (8.0 * i / kLambda4) * y3 * y1) * y1m;
  return {da1, da3};
}

// Brute-force double sum over a sparse coefficient map, keeping |k| <= n.
inline std::map<int, C> brute_convolution(const std::map<int, C>& a, const std::map<int, C>& b, int n) {
  std::map<int, C> out;
  for (const auto& [ka, va] : a) {
    for (const auto& [kb, vb] : b) {
      const int k = ka + kb;
      if (k < -n || k > n) continue;
      out[k] += va * vb;
    }
  }
  return out;
}

}  // namespace duks::testing
