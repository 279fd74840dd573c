#pragma once

#include <cstdint>
#include <vector>

#include "duks/landau.hpp"
#include "duks/noise.hpp"
#include "duks/rng.hpp"
#include "duks/spectrum.hpp"

namespace duks {

/// Everything needed to run one coupled (full + amplitude) path.
struct SimConfig {
  double eps = 0.1;
  double t0 = 1.0;              // slow horizon; the fast horizon is t0 / eps^2
  int modes = 32;               // truncation N
  double dt = 0.01;             // fast step
  double output_interval = 1.0; // fast time between recorded samples
  std::uint64_t seed = 1;
  Complex a1{1.0, 0.0};
  Complex a3{0.5, 0.0};
  NoiseScaling noise = NoiseScaling::standard(0.1);
  double blowup_threshold = 1e6;

  /// Returns a copy with eps replaced everywhere it appears.
  SimConfig with_eps(double new_eps) const;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  double fast_horizon() const { return t0 / (eps * eps); }
  std::int64_t fast_steps() const;
  std::int64_t output_stride() const;
  /// Fast-step indices at which samples are recorded: multiples of the
  /// stride, plus the final step.
  std::vector<std::int64_t> sample_steps() const;
};

/// Samples of one full-equation path on the fast time scale.
struct Trajectory {
  double eps = 0.0;
  std::vector<std::int64_t> steps;
  std::vector<double> times;
  std::vector<SpectralField> v;   // regular part
  std::vector<SpectralField> z;   // OU part Z(k, t) = c_k Zhat_k(t)
  NoiseHistory noise;             // slow-scale modes at every fast step

  SpectralField u(std::size_t i) const { return v[i] + z[i]; }
};

/// phi_1(x) = (e^x - 1)/x with phi_1(0) = 1.
double phi1(double x);

/// Exponential-Euler integrator for the regular part, with the per-mode
/// factors e^{mu h} and h phi_1(mu h), mu = lambda + eps^2, precomputed.
class ExponentialEuler {
 public:
  ExponentialEuler(int truncation, double eps, double h);

  SpectralField step(const SpectralField& v, const SpectralField& z) const;

 private:
  int truncation_;
  double eps2_;
  std::vector<double> decay_;
  std::vector<double> weight_;
};

/// One exponential-Euler step of
///   dv/dt = (lambda + eps^2) v + eps^2 Z + i k ((v+Z)*(v+Z)),
/// with the forcing frozen at the step start.
SpectralField step_v(const SpectralField& v, const SpectralField& z, double eps, double h);

/// Integrates v and the OU lattice on [0, t0/eps^2] from the zero-error
/// initial data. Throws DivergenceError naming the first offending (k, t).
Trajectory simulate_path(const SimConfig& config, NoiseKey key);

/// Res(k) = -dv/dt + (lambda + eps^2) v + eps^2 Z + i k ((v+Z)*(v+Z)).
SpectralField full_residual(const SpectralField& v, const SpectralField& z, double eps,
                            const SpectralField& dv_dt);

/// Initial regular part: eps A_{±1,±3}(0) and eps^2 times the slaved modes at Z = 0.
SpectralField initial_regular_part(const SimConfig& config);

}  // namespace duks
