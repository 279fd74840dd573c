#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace duks {

using Complex = std::complex<double>;

/// Fourier coefficients of a 2π-periodic function, indexed by wavenumber
/// k in [-N, N]. A real function has coeff(-k) == conj(coeff(k)); `set`
/// maintains that pairing, raw access does not.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(int truncation);

  static SpectralField zero(int truncation) { return SpectralField(truncation); }
  /// coeff(k) = coeff(-k) = value (value must be real for the field to be real).
  static SpectralField cosine(int truncation, int k, double value);

  int truncation() const noexcept { return truncation_; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  Complex operator[](int k) const { return coeffs_[index(k)]; }

  /// Sets coeff(k) = z and coeff(-k) = conj(z). For k == 0 only the real part is kept.
  void set(int k, Complex z);

  /// Unpaired access; used by tests that need to break the symmetry on purpose.
  Complex& raw(int k) { return coeffs_[index(k)]; }

  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> mutable_coeffs() noexcept { return coeffs_; }

  bool is_hermitian(double tolerance = 0.0) const;
  bool all_finite() const;
  double l1_magnitude() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool operator==(const SpectralField&) const = default;

 private:
  std::size_t index(int k) const noexcept {
    return static_cast<std::size_t>(k + truncation_);
  }

  int truncation_ = 0;
  std::vector<Complex> coeffs_;
};

struct WeightedNormParams {
  double r = 2.0;

  /// Throws ConfigError unless 1/2 < r < 3.
  static WeightedNormParams checked(double r);
};

/// Linear growth rate -(1-k^2)^2 (9-k^2)^2; zero exactly at |k| in {1, 3}.
double symbol_lambda(int k);

inline bool is_critical_mode(int k) {
  const int a = k < 0 ? -k : k;
  return a == 1 || a == 3;
}

/// c(k) = sum_{k'} a(k-k') b(k') over index pairs with both factors inside
/// [-N, N]; results outside [-N, N] are dropped. Direct double sum.
SpectralField convolve(const SpectralField& a, const SpectralField& b);

/// (sum_k |a_k|^2 (1+k^2)^r)^{1/2}
double weighted_norm(const SpectralField& a, const WeightedNormParams& p);

/// Samples u(x_j) = sum_k a_k e^{i k x_j} at x_j = 2πj/m. Requires m >= 4N.
/// Throws ConsistencyError when the imaginary residue exceeds 1e-12 of the
/// field's l1 magnitude.
std::vector<double> evaluate_on_grid(const SpectralField& a, int m);

struct SupNormEstimate {
  double grid_max = 0.0;
  double l1_bound = 0.0;
};

SupNormEstimate sup_norm_estimate(const SpectralField& a, int m);

/// Discrete Fourier analysis of m real samples back onto [-N, N].
SpectralField analyze_grid(std::span<const double> samples, int truncation);

}  // namespace duks
