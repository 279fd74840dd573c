#include "duks/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "duks/error.hpp"

namespace duks {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_integer_multiple(double total, double unit, std::int64_t& count) {
  const double ratio = total / unit;
  count = std::llround(ratio);
  return count > 0 && std::abs(static_cast<double>(count) - ratio) <= 1e-9 * std::max(1.0, ratio);
}

}  // namespace

SimConfig SimConfig::with_eps(double new_eps) const {
  SimConfig copy = *this;
  copy.eps = new_eps;
  copy.noise.eps = new_eps;
  return copy;
}

void SimConfig::validate() const {
  if (!(eps > 0.0 && eps <= 0.5)) throw ConfigError("eps must lie in (0, 0.5], got " + std::to_string(eps));
  if (noise.eps != eps) throw ConfigError("noise scaling eps does not match the simulation eps");
  if (!(t0 > 0.0)) throw ConfigError("t0 must be positive, got " + std::to_string(t0));
  if (!(dt > 0.0)) throw ConfigError("dt must be positive, got " + std::to_string(dt));
  if (modes < 6) throw ConfigError("modes must be at least 6 to hold the slaved modes, got " + std::to_string(modes));
  if (!(output_interval > 0.0)) throw ConfigError("output_interval must be positive");
  if (!(blowup_threshold > 0.0)) throw ConfigError("blowup_threshold must be positive");
  std::int64_t count = 0;
  if (!is_integer_multiple(fast_horizon(), dt, count)) {
    throw ConfigError("dt = " + std::to_string(dt) + " does not divide the fast horizon t0/eps^2 = " +
                      std::to_string(fast_horizon()));
  }
  if (!is_integer_multiple(output_interval, dt, count)) {
    throw ConfigError("dt = " + std::to_string(dt) + " does not divide output_interval = " +
                      std::to_string(output_interval));
  }
}

std::int64_t SimConfig::fast_steps() const {
  return std::llround(fast_horizon() / dt);
}

std::int64_t SimConfig::output_stride() const {
  return std::max<std::int64_t>(1, std::llround(output_interval / dt));
}

std::vector<std::int64_t> SimConfig::sample_steps() const {
  const std::int64_t total = fast_steps();
  const std::int64_t stride = output_stride();
  std::vector<std::int64_t> steps;
  for (std::int64_t n = 0; n <= total; n += stride) steps.push_back(n);
  if (steps.back() != total) steps.push_back(total);
  return steps;
}

double phi1(double x) {
  if (std::abs(x) < 1e-4) {
    return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x / 24.0));
  }
  return std::expm1(x) / x;
}

ExponentialEuler::ExponentialEuler(int truncation, double eps, double h)
    : truncation_(truncation), eps2_(eps * eps) {
  decay_.resize(static_cast<std::size_t>(truncation) + 1);
  weight_.resize(static_cast<std::size_t>(truncation) + 1);
  for (int k = 0; k <= truncation; ++k) {
    const double mu = symbol_lambda(k) + eps2_;
    decay_[static_cast<std::size_t>(k)] = std::exp(mu * h);
    weight_[static_cast<std::size_t>(k)] = h * phi1(mu * h);
  }
}

SpectralField ExponentialEuler::step(const SpectralField& v, const SpectralField& z) const {
  if (v.truncation() != truncation_ || z.truncation() != truncation_) {
    throw ConfigError("step_v: field truncation does not match the integrator");
  }
  const SpectralField w = v + z;
  const SpectralField quad = convolve(w, w);
  SpectralField next(truncation_);
  for (int k = 0; k <= truncation_; ++k) {
    const Complex forcing = eps2_ * z[k] + kI * static_cast<double>(k) * quad[k];
    const auto i = static_cast<std::size_t>(k);
    next.set(k, decay_[i] * v[k] + weight_[i] * forcing);
  }
  return next;
}

SpectralField step_v(const SpectralField& v, const SpectralField& z, double eps, double h) {
  return ExponentialEuler(v.truncation(), eps, h).step(v, z);
}

SpectralField initial_regular_part(const SimConfig& config) {
  const AmplitudeState a0 = make_amplitude_state(0.0, config.a1, config.a3, SlowNoise{});
  return reconstruct_approximation(a0, config.eps, ApproxOrder::second, config.modes);
}

Trajectory simulate_path(const SimConfig& config, NoiseKey key) {
  config.validate();
  const std::int64_t total = config.fast_steps();
  const std::vector<std::int64_t> samples = config.sample_steps();
  const ExponentialEuler stepper(config.modes, config.eps, config.dt);

  Trajectory traj;
  traj.eps = config.eps;
  traj.noise.eps = config.eps;
  traj.noise.dt = config.dt;
  traj.noise.samples.reserve(static_cast<std::size_t>(total) + 1);
  traj.steps = samples;
  traj.times.reserve(samples.size());
  traj.v.reserve(samples.size());
  traj.z.reserve(samples.size());

  OULattice lattice(config.modes, key);
  SpectralField v = initial_regular_part(config);
  std::size_t next_sample = 0;

  const auto record = [&](std::int64_t n) {
    while (next_sample < samples.size() && samples[next_sample] == n) {
      traj.times.push_back(static_cast<double>(n) * config.dt);
      traj.v.push_back(v);
      traj.z.push_back(lattice.values());
      ++next_sample;
    }
  };

  traj.noise.samples.push_back(SlowNoise::from_lattice(lattice));
  record(0);
  for (std::int64_t n = 0; n < total; ++n) {
    const SpectralField z_start = lattice.values();
    lattice.advance(config.noise, config.dt);
    v = stepper.step(v, z_start);

    const double t = static_cast<double>(n + 1) * config.dt;
    for (int k = 0; k <= config.modes; ++k) {
      const Complex c = v[k];
      const double mag = std::abs(c);
      if (!std::isfinite(mag) || mag > config.blowup_threshold) {
        throw DivergenceError(k, t, "regular part diverged at mode k = " + std::to_string(k) +
                                        ", t = " + std::to_string(t) +
                                        " (|v| = " + std::to_string(mag) + ")");
      }
    }
    traj.noise.samples.push_back(SlowNoise::from_lattice(lattice));
    record(n + 1);
  }
  return traj;
}

SpectralField full_residual(const SpectralField& v, const SpectralField& z, double eps,
                            const SpectralField& dv_dt) {
  const int n = v.truncation();
  if (z.truncation() != n || dv_dt.truncation() != n) {
    throw ConfigError("full_residual: truncation mismatch");
  }
  const double eps2 = eps * eps;
  const SpectralField w = v + z;
  const SpectralField quad = convolve(w, w);
  SpectralField res(n);
  for (int k = -n; k <= n; ++k) {
    res.raw(k) = -dv_dt[k] + (symbol_lambda(k) + eps2) * v[k] + eps2 * z[k] +
                 kI * static_cast<double>(k) * quad[k];
  }
  return res;
}

}  // namespace duks
