#include "duks/landau.hpp"

#include <cmath>
#include <string>

#include "duks/error.hpp"

namespace duks {

namespace {

constexpr Complex kI{0.0, 1.0};

const double kLambda2 = symbol_lambda(2);
const double kLambda4 = symbol_lambda(4);
const double kLambda6 = symbol_lambda(6);

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

Complex AmplitudeState::amplitude(int j) const {
  const int a = j < 0 ? -j : j;
  Complex value{};
  switch (a) {
    case 1: value = a1; break;
    case 2: value = slaved.a2; break;
    case 3: value = a3; break;
    case 4: value = slaved.a4; break;
    case 6: value = slaved.a6; break;
    default: return {};
  }
  return j < 0 ? std::conj(value) : value;
}

SlavedModes slaved_modes(Complex a1, Complex a3, const SlowNoise& z) {
  const Complex y1 = z(1) + a1;
  const Complex y3 = z(3) + a3;
  return {
      -(2.0 * kI * y1 * y1 + 4.0 * kI * y3 * std::conj(y1)) / kLambda2,
      -(8.0 * kI * y3 * y1) / kLambda4,
      -(6.0 * kI * y3 * y3) / kLambda6,
  };
}

AmplitudeRates rhs_amplitudes(Complex a1, Complex a3, const SlowNoise& z) {
  const SlavedModes s = slaved_modes(a1, a3, z);
  const Complex z0 = z(0);
  const Complex y1 = z(1) + a1;
  const Complex y2 = z(2) + s.a2;
  const Complex y3 = z(3) + a3;
  const Complex y4 = z(4) + s.a4;
  const Complex y6 = z(6) + s.a6;

  AmplitudeRates rates;
  rates.da1 = a1 + z(1) + 2.0 * kI * y2 * std::conj(y1) + 2.0 * kI * z0 * y1 +
              2.0 * kI * y3 * std::conj(y2) + 2.0 * kI * y4 * std::conj(y3);
  rates.da3 = a3 + z(3) + 6.0 * kI * y2 * y1 + 6.0 * kI * z0 * y3 +
              6.0 * kI * y6 * std::conj(y3) + 6.0 * kI * y4 * std::conj(y1);
  return rates;
}

AmplitudeState make_amplitude_state(double slow_time, Complex a1, Complex a3, const SlowNoise& z) {
  return {slow_time, a1, a3, slaved_modes(a1, a3, z)};
}

AmplitudeState step_amplitudes(const AmplitudeState& state, const SlowNoise& z_now,
                               const SlowNoise& z_next, double slow_step) {
  const AmplitudeRates k1 = rhs_amplitudes(state.a1, state.a3, z_now);
  const Complex p1 = state.a1 + slow_step * k1.da1;
  const Complex p3 = state.a3 + slow_step * k1.da3;
  const AmplitudeRates k2 = rhs_amplitudes(p1, p3, z_next);
  const Complex a1 = state.a1 + 0.5 * slow_step * (k1.da1 + k2.da1);
  const Complex a3 = state.a3 + 0.5 * slow_step * (k1.da3 + k2.da3);
  const double t_next = state.slow_time + slow_step;
  if (!finite(a1)) throw DivergenceError(1, t_next, "amplitude A1 diverged at T = " + std::to_string(t_next));
  if (!finite(a3)) throw DivergenceError(3, t_next, "amplitude A3 diverged at T = " + std::to_string(t_next));
  return make_amplitude_state(t_next, a1, a3, z_next);
}

SpectralField reconstruct_approximation(const AmplitudeState& state, double eps, ApproxOrder order,
                                        int truncation) {
  SpectralField f(truncation);
  const auto place = [&](int k, Complex value) {
    if (k <= truncation) f.set(k, value);
  };
  place(1, eps * state.a1);
  place(3, eps * state.a3);
  if (order == ApproxOrder::second) {
    const double eps2 = eps * eps;
    place(2, eps2 * state.slaved.a2);
    place(4, eps2 * state.slaved.a4);
    place(6, eps2 * state.slaved.a6);
  }
  return f;
}

AmplitudeTrajectory integrate_amplitudes(Complex a1, Complex a3, const NoiseHistory& noise,
                                         const std::vector<std::int64_t>& sample_steps) {
  if (noise.samples.empty()) throw SequencingError("integrate_amplitudes: empty noise history");
  const auto last = static_cast<std::int64_t>(noise.samples.size()) - 1;
  for (const std::int64_t s : sample_steps) {
    if (s < 0 || s > last) {
      throw SequencingError("integrate_amplitudes: sample step " + std::to_string(s) +
                            " outside the recorded noise history");
    }
  }
  const double slow_step = noise.eps * noise.eps * noise.dt;
  AmplitudeTrajectory traj;
  traj.steps = sample_steps;
  traj.states.reserve(sample_steps.size());

  AmplitudeState state = make_amplitude_state(0.0, a1, a3, noise.samples.front());
  std::size_t next_sample = 0;
  for (std::int64_t n = 0;; ++n) {
    // Slow time is recomputed from the step index so it matches the fast grid exactly.
    state.slow_time = static_cast<double>(n) * slow_step;
    while (next_sample < sample_steps.size() && sample_steps[next_sample] == n) {
      traj.states.push_back(state);
      ++next_sample;
    }
    if (next_sample == sample_steps.size() || n == last) break;
    state = step_amplitudes(state, noise.samples[static_cast<std::size_t>(n)],
                            noise.samples[static_cast<std::size_t>(n + 1)], slow_step);
  }
  if (traj.states.size() != sample_steps.size()) {
    throw SequencingError("integrate_amplitudes: sample steps must be non-decreasing");
  }
  return traj;
}

}  // namespace duks
