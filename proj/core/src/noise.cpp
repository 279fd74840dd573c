#include "duks/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "duks/error.hpp"

namespace duks {

double NoiseScaling::alpha(int k) const {
  if (!enabled) return 0.0;
  double a = std::pow(eps, alpha_exponent);
  if (colored_theta != 0.0) {
    a *= std::pow(1.0 + static_cast<double>(k) * k, -0.5 * colored_theta);
  }
  return a;
}

double NoiseScaling::c(int k) const {
  return std::pow(eps, is_critical_mode(k) ? critical_c_exponent : stable_c_exponent);
}

Complex complex_gaussian(const NoiseKey& key, int k, std::uint64_t step) noexcept {
  const GaussianPair g = standard_normal_pair(key, k, step);
  if (k == 0) return {g.re, 0.0};
  return Complex(g.re, g.im) * std::sqrt(0.5);
}

OUTransition OUTransition::exact(double lambda, double h) {
  if (lambda == 0.0) return {1.0, std::sqrt(h)};
  // (e^{2 lambda h} - 1) / (2 lambda) written with expm1 for small |lambda h|.
  return {std::exp(lambda * h), std::sqrt(std::expm1(2.0 * lambda * h) / (2.0 * lambda))};
}

WienerLattice::WienerLattice(int truncation, NoiseKey key) : key_(key), w_(truncation) {}

void WienerLattice::advance(double h) {
  if (h < 0.0) throw DomainError("advance_wiener: negative step " + std::to_string(h));
  if (h == 0.0) return;
  const double scale = std::sqrt(h);
  for (int k = 0; k <= w_.truncation(); ++k) {
    w_.set(k, w_[k] + scale * complex_gaussian(key_, k, step_));
  }
  t_ += h;
  ++step_;
}

WienerLattice advance_wiener(WienerLattice state, double h) {
  state.advance(h);
  return state;
}

OULattice::OULattice(int truncation, NoiseKey key)
    : key_(key), z_(truncation), znorm_(truncation) {}

void OULattice::advance(const NoiseScaling& scaling, double h) {
  if (h < 0.0) throw DomainError("advance_ou: negative step " + std::to_string(h));
  if (h == 0.0) return;
  for (int k = 0; k <= z_.truncation(); ++k) {
    const OUTransition tr = OUTransition::exact(symbol_lambda(k), h);
    Complex next = tr.decay * z_[k];
    const double alpha = scaling.alpha(k);
    if (alpha != 0.0) next += alpha * tr.spread * complex_gaussian(key_, k, step_);
    z_.set(k, next);
    znorm_.set(k, next / scaling.c(k));
  }
  t_ += h;
  ++step_;
}

OULattice advance_ou(OULattice state, const NoiseScaling& scaling, double h) {
  state.advance(scaling, h);
  return state;
}

double ou_second_moment(int k, double t, const NoiseScaling& scaling) {
  if (t < 0.0) throw DomainError("ou_second_moment: negative time");
  const double alpha = scaling.alpha(k);
  const double lambda = symbol_lambda(k);
  if (lambda == 0.0) return alpha * alpha * t;
  return alpha * alpha * -std::expm1(2.0 * lambda * t) / (2.0 * std::abs(lambda));
}

double tail_bound(int k, double t, double c, const NoiseScaling& scaling) {
  if (!(c > 0.0)) throw DomainError("tail_bound: threshold must be positive, got " + std::to_string(c));
  if (t < 0.0) throw DomainError("tail_bound: negative time");
  const double alpha = scaling.alpha(k);
  const double lambda = symbol_lambda(k);
  const double bound = lambda == 0.0 ? alpha * alpha * t / (c * c)
                                     : alpha * alpha / (2.0 * std::abs(lambda) * c * c);
  return std::min(1.0, bound);
}

SlowNoise SlowNoise::from_lattice(const OULattice& lattice) {
  SlowNoise s;
  const int top = std::min(6, lattice.truncation());
  for (int k = 0; k <= top; ++k) s.z[static_cast<std::size_t>(k)] = lattice.normalized()[k];
  return s;
}

SlowNoise sample_slow_path(const NoiseHistory& history, double slow_time) {
  if (slow_time < 0.0) throw SequencingError("sample_slow_path: negative slow time");
  if (history.samples.empty()) throw SequencingError("sample_slow_path: empty noise history");
  const double fast = slow_time / (history.eps * history.eps);
  // Nearest grid point at or below, with a small allowance for rounding of T/eps^2.
  const auto index = static_cast<std::size_t>(std::floor(fast / history.dt + 1e-9));
  if (index >= history.samples.size()) {
    throw SequencingError("sample_slow_path: slow time " + std::to_string(slow_time) +
                          " lies beyond the simulated horizon " +
                          std::to_string(history.horizon()));
  }
  return history.samples[index];
}

}  // namespace duks
