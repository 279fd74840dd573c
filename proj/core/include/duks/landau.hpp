#pragma once

#include <cstdint>
#include <vector>

#include "duks/noise.hpp"
#include "duks/spectrum.hpp"

namespace duks {

enum class ApproxOrder { first, second };

/// Amplitudes of the damped modes 2, 4, 6 balanced against the critical ones.
struct SlavedModes {
  Complex a2{};
  Complex a4{};
  Complex a6{};
};

/// Slow-time state of the coupled Landau system. Only positive indices are
/// stored; A_{-j} = conj(A_j).
struct AmplitudeState {
  double slow_time = 0.0;
  Complex a1{};
  Complex a3{};
  SlavedModes slaved{};

  /// A_j for j in {±1, ±2, ±3, ±4, ±6}; zero elsewhere.
  Complex amplitude(int j) const;
};

struct AmplitudeRates {
  Complex da1{};
  Complex da3{};
};

SlavedModes slaved_modes(Complex a1, Complex a3, const SlowNoise& z);

/// Right-hand side of the reduced (A1, A3) system, evaluated by inserting the
/// slaved modes into the pre-elimination equations.
AmplitudeRates rhs_amplitudes(Complex a1, Complex a3, const SlowNoise& z);

AmplitudeState make_amplitude_state(double slow_time, Complex a1, Complex a3, const SlowNoise& z);

/// One Heun step of the random ODE. `z_now` and `z_next` are the noise
/// values at T and T + dT. Throws DivergenceError on a non-finite result.
AmplitudeState step_amplitudes(const AmplitudeState& state, const SlowNoise& z_now,
                               const SlowNoise& z_next, double slow_step);

/// eps A_{±1}, eps A_{±3} (and eps^2 A_{±2,±4,±6} for second order) on [-N, N].
SpectralField reconstruct_approximation(const AmplitudeState& state, double eps, ApproxOrder order,
                                        int truncation);

struct AmplitudeTrajectory {
  std::vector<std::int64_t> steps;  // fast-grid indices of the samples
  std::vector<AmplitudeState> states;
};

/// Integrates (A1, A3) from the given initial values with one Heun step per
/// fast step (dT = eps^2 dt), recording the states at `sample_steps`.
AmplitudeTrajectory integrate_amplitudes(Complex a1, Complex a3, const NoiseHistory& noise,
                                         const std::vector<std::int64_t>& sample_steps);

}  // namespace duks
