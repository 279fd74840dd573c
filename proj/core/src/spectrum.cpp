#include "duks/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "duks/error.hpp"

namespace duks {

namespace {

void require_same_truncation(const SpectralField& a, const SpectralField& b, const char* op) {
  if (a.truncation() != b.truncation()) {
    throw ConfigError(std::string(op) + ": truncation mismatch (" +
                      std::to_string(a.truncation()) + " vs " +
                      std::to_string(b.truncation()) + ")");
  }
}

// e^{2πi j/m} for j in [0, m); products k*j are reduced mod m so every
// sample uses an exactly tabulated root of unity.
std::vector<Complex> roots_of_unity(int m) {
  std::vector<Complex> table(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double phase = 2.0 * std::numbers::pi * j / m;
    table[static_cast<std::size_t>(j)] = {std::cos(phase), std::sin(phase)};
  }
  return table;
}

std::size_t wrap(long long value, int m) {
  long long r = value % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace

SpectralField::SpectralField(int truncation) : truncation_(truncation) {
  if (truncation < 1) {
    throw ConfigError("spectral truncation must be positive, got " + std::to_string(truncation));
  }
  coeffs_.assign(static_cast<std::size_t>(2 * truncation + 1), Complex{});
}

SpectralField SpectralField::cosine(int truncation, int k, double value) {
  SpectralField f(truncation);
  f.set(k, value);
  return f;
}

void SpectralField::set(int k, Complex z) {
  if (k == 0) {
    coeffs_[index(0)] = Complex(z.real(), 0.0);
    return;
  }
  coeffs_[index(k)] = z;
  coeffs_[index(-k)] = std::conj(z);
}

bool SpectralField::is_hermitian(double tolerance) const {
  if (std::abs(coeffs_[index(0)].imag()) > tolerance) return false;
  for (int k = 1; k <= truncation_; ++k) {
    if (std::abs((*this)[k] - std::conj((*this)[-k])) > tolerance) return false;
  }
  return true;
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double SpectralField::l1_magnitude() const {
  double total = 0.0;
  for (const Complex z : coeffs_) total += std::abs(z);
  return total;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_truncation(*this, other, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_truncation(*this, other, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (Complex& z : coeffs_) z *= scale;
  return *this;
}

WeightedNormParams WeightedNormParams::checked(double r) {
  if (!(r > 0.5 && r < 3.0)) {
    throw ConfigError("weighted norm exponent r must lie in (1/2, 3), got " + std::to_string(r));
  }
  return WeightedNormParams{r};
}

double symbol_lambda(int k) {
  const double k2 = static_cast<double>(k) * static_cast<double>(k);
  const double a = 1.0 - k2;
  const double b = 9.0 - k2;
  return -(a * a) * (b * b);
}

SpectralField convolve(const SpectralField& a, const SpectralField& b) {
  require_same_truncation(a, b, "convolve");
  const int n = a.truncation();
  SpectralField c(n);
  const std::span<const Complex> ac = a.coeffs();
  const std::span<const Complex> bc = b.coeffs();
  std::span<Complex> out = c.mutable_coeffs();
  for (int k = -n; k <= n; ++k) {
    const int lo = std::max(-n, k - n);
    const int hi = std::min(n, k + n);
    Complex sum{};
    for (int kp = lo; kp <= hi; ++kp) {
      sum += ac[static_cast<std::size_t>(k - kp + n)] * bc[static_cast<std::size_t>(kp + n)];
    }
    out[static_cast<std::size_t>(k + n)] = sum;
  }
  return c;
}

double weighted_norm(const SpectralField& a, const WeightedNormParams& p) {
  const int n = a.truncation();
  double total = 0.0;
  for (int k = -n; k <= n; ++k) {
    total += std::norm(a[k]) * std::pow(1.0 + static_cast<double>(k) * k, p.r);
  }
  return std::sqrt(total);
}

std::vector<double> evaluate_on_grid(const SpectralField& a, int m) {
  const int n = a.truncation();
  if (m < 4 * n) {
    throw ConfigError("evaluate_on_grid: grid size " + std::to_string(m) +
                      " is below the anti-aliasing minimum 4N = " + std::to_string(4 * n));
  }
  const std::vector<Complex> roots = roots_of_unity(m);
  const double tolerance = 1e-12 * a.l1_magnitude();
  std::vector<double> samples(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    Complex u{};
    for (int k = -n; k <= n; ++k) {
      u += a[k] * roots[wrap(static_cast<long long>(k) * j, m)];
    }
    if (std::abs(u.imag()) > tolerance) {
      throw ConsistencyError("evaluate_on_grid: imaginary residue " + std::to_string(u.imag()) +
                             " at sample " + std::to_string(j) +
                             " (field is not Hermitian)");
    }
    samples[static_cast<std::size_t>(j)] = u.real();
  }
  return samples;
}

SupNormEstimate sup_norm_estimate(const SpectralField& a, int m) {
  SupNormEstimate est;
  for (const double u : evaluate_on_grid(a, m)) est.grid_max = std::max(est.grid_max, std::abs(u));
  est.l1_bound = a.l1_magnitude();
  return est;
}

SpectralField analyze_grid(std::span<const double> samples, int truncation) {
  const int m = static_cast<int>(samples.size());
  if (m < 2 * truncation + 1) {
    throw ConfigError("analyze_grid: " + std::to_string(m) + " samples cannot resolve truncation " +
                      std::to_string(truncation));
  }
  const std::vector<Complex> roots = roots_of_unity(m);
  SpectralField f(truncation);
  for (int k = -truncation; k <= truncation; ++k) {
    Complex sum{};
    for (int j = 0; j < m; ++j) {
      sum += samples[static_cast<std::size_t>(j)] * std::conj(roots[wrap(static_cast<long long>(k) * j, m)]);
    }
    f.raw(k) = sum / static_cast<double>(m);
  }
  return f;
}

}  // namespace duks
