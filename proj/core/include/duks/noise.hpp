#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "duks/rng.hpp"
#include "duks/spectrum.hpp"

namespace duks {

/// Noise amplitudes alpha_k and rescaling constants c_k as powers of eps:
///   alpha_k = eps^alpha_exponent * (1+k^2)^(-colored_theta/2)
///   c_k     = eps^critical_c_exponent   for |k| in {1,3}
///           = eps^stable_c_exponent     otherwise
/// The defaults give alpha_k = eps^2, c_{±1,±3} = eps, c_k = eps^2.
struct NoiseScaling {
  double eps = 0.1;
  bool enabled = true;
  double alpha_exponent = 2.0;
  double critical_c_exponent = 1.0;
  double stable_c_exponent = 2.0;
  double colored_theta = 0.0;

  static NoiseScaling standard(double eps) { return NoiseScaling{.eps = eps}; }
  static NoiseScaling noiseless(double eps) { return NoiseScaling{.eps = eps, .enabled = false}; }

  double alpha(int k) const;
  double c(int k) const;
};

/// Standard complex Gaussian for mode k > 0 (E|G|^2 = 1, independent re/im
/// parts of variance 1/2); real with unit variance for k == 0.
Complex complex_gaussian(const NoiseKey& key, int k, std::uint64_t step) noexcept;

/// Exact one-step OU transition for dZ = lambda Z dt + dW:
///   Z(t+h) = decay * Z(t) + spread * G,   decay = e^{lambda h},
///   spread^2 = (e^{2 lambda h} - 1) / (2 lambda)   (= h when lambda == 0).
struct OUTransition {
  double decay = 1.0;
  double spread = 0.0;

  static OUTransition exact(double lambda, double h);
};

class WienerLattice {
 public:
  WienerLattice(int truncation, NoiseKey key);

  double time() const noexcept { return t_; }
  std::uint64_t step_index() const noexcept { return step_; }
  const NoiseKey& key() const noexcept { return key_; }
  const SpectralField& values() const noexcept { return w_; }

  /// Adds an independent increment with E|dW(k)|^2 = h to every mode.
  void advance(double h);

 private:
  NoiseKey key_;
  double t_ = 0.0;
  std::uint64_t step_ = 0;
  SpectralField w_;
};

WienerLattice advance_wiener(WienerLattice state, double h);

/// Per-mode OU processes Z(k, t) driven by alpha_k dW(k, t), Z(k, 0) = 0.
/// Znorm holds Z(k, t) / c_k.
class OULattice {
 public:
  OULattice(int truncation, NoiseKey key);

  double time() const noexcept { return t_; }
  std::uint64_t step_index() const noexcept { return step_; }
  const NoiseKey& key() const noexcept { return key_; }
  int truncation() const noexcept { return z_.truncation(); }
  const SpectralField& values() const noexcept { return z_; }
  const SpectralField& normalized() const noexcept { return znorm_; }

  void advance(const NoiseScaling& scaling, double h);

 private:
  NoiseKey key_;
  double t_ = 0.0;
  std::uint64_t step_ = 0;
  SpectralField z_;
  SpectralField znorm_;
};

OULattice advance_ou(OULattice state, const NoiseScaling& scaling, double h);

/// E|Z(k,t)|^2: alpha_k^2 (1 - e^{2 lambda t}) / (2|lambda|), or alpha_k^2 t on critical modes.
double ou_second_moment(int k, double t, const NoiseScaling& scaling);

/// Martingale-inequality bound on P(sup_{tau <= t} |Z(k,tau)| >= c), clipped at 1.
/// Throws DomainError when c <= 0.
double tail_bound(int k, double t, double c, const NoiseScaling& scaling);

/// Rescaled noise Zhat_k = Z(k,t)/c_k for k in [0, 6] at one fast time; the
/// negative wavenumbers are the conjugates.
struct SlowNoise {
  std::array<Complex, 7> z{};

  Complex operator()(int k) const { return k >= 0 ? z[static_cast<std::size_t>(k)] : std::conj(z[static_cast<std::size_t>(-k)]); }

  static SlowNoise from_lattice(const OULattice& lattice);
};

/// The slow-scale modes of one noise realization, recorded at every fast step.
struct NoiseHistory {
  double eps = 0.0;
  double dt = 0.0;
  std::vector<SlowNoise> samples;  // samples[n] is fast time n * dt

  double horizon() const noexcept {
    return samples.empty() ? 0.0 : static_cast<double>(samples.size() - 1) * dt;
  }
};

/// Zhat_k at slow time T, taken from the fast grid point at or below T/eps^2.
/// Throws SequencingError beyond the recorded horizon.
SlowNoise sample_slow_path(const NoiseHistory& history, double slow_time);

}  // namespace duks
