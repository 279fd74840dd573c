#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "duks/landau.hpp"
#include "duks/noise.hpp"
#include "duks/solver.hpp"
#include "duks/spectrum.hpp"

namespace duks {

// ---------------------------------------------------------------------------
// Statistics helpers

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  bool valid = false;  // false when some y <= 0 (log undefined)
};

/// Least squares of log(y) against log(x). Needs >= 2 points with positive x;
/// returns an invalid fit if any y <= 0.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Linearly interpolated sample quantile (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Bootstrap standard error of the q-quantile, deterministic in `seed`.
double bootstrap_quantile_se(std::span<const double> values, double q, int resamples,
                             std::uint64_t seed);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 for 95%).
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.96);

// ---------------------------------------------------------------------------
// Pathwise errors

/// Errors of one coupled path. All suprema run over the trajectory's sample times.
struct ErrorRecord {
  std::uint64_t path = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  bool aborted = false;
  std::string abort_reason;

  double error_r = 0.0;           // E_R = sup_t ||R(t)||_{l2_r}
  double error_r_critical = 0.0;  // S_c: modes ±1, ±3
  double error_r_stable = 0.0;    // S_s: all other modes
  double sup_v = 0.0;             // E_sup_v = sup_t sup_x |v - approx|
  double sup_u = 0.0;             // E_sup_u = sup_t sup_x |u - first-order approx|
  double sup_v_l1_bound = 0.0;    // sup_t of the l1 bound assembled from R and eps powers
};

/// Error variables R_k(t): (v - eps A)/eps^2 on ±1, ±3; (v - eps^2 A)/eps^3
/// on ±2, ±4, ±6; v/eps^3 elsewhere.
SpectralField error_variables(const SpectralField& v, const AmplitudeState& amp, double eps);

/// Throws SequencingError unless the trajectories share sample steps.
ErrorRecord pathwise_error(const Trajectory& traj, const AmplitudeTrajectory& amp, double eps,
                           const WeightedNormParams& norm, ApproxOrder order);

/// Runs simulate_path + integrate_amplitudes + pathwise_error for one key.
/// Divergence is recorded as an aborted record, never thrown.
ErrorRecord run_coupled_path(const SimConfig& config, NoiseKey key,
                             const WeightedNormParams& norm, ApproxOrder order);

// ---------------------------------------------------------------------------
// Epsilon scaling

struct MetricSummary {
  double median = 0.0;
  double p95 = 0.0;
  double median_se = 0.0;  // bootstrap
};

struct ScalingRow {
  double eps = 0.0;
  int paths = 0;
  int aborted = 0;
  MetricSummary sup_v;
  MetricSummary sup_u;
  MetricSummary error_r;
  double success_fraction = 0.0;  // P(E_sup_v <= C2 eps^2)
  Interval success_wilson;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  std::vector<ErrorRecord> records;  // all paths, eps-major
  SlopeFit sup_v_fit;
  SlopeFit sup_u_fit;
  SlopeFit error_r_fit;
  double c2 = 0.0;
  double pooled_success_fraction = 0.0;
  Interval pooled_success_wilson;
  double error_r_spread = 0.0;  // max/min of the per-eps median E_R
};

struct ScalingOptions {
  int paths = 32;
  int workers = 0;
  ApproxOrder order = ApproxOrder::first;  // the ansatz the O(eps^2) bound is stated for
  double r = 2.0;
  double c2_factor = 1.5;
  int bootstrap_resamples = 1000;
  std::function<void(double eps, std::uint64_t path)> progress;
};

/// Fraction of non-aborted records with sup_v <= c2 eps^2.
double success_fraction(std::span<const ErrorRecord> records, double c2);

/// Fits log-log slopes of the per-eps medians. Requires >= 3 distinct eps and >= 1 path.
ScalingTable epsilon_scaling_study(const SimConfig& base, std::span<const double> eps_list,
                                   const ScalingOptions& options);

/// Rebuilds the summary of a table from its records (used when eps rows are dropped).
ScalingTable summarize_scaling(std::vector<ErrorRecord> records, std::span<const double> eps_list,
                               const ScalingOptions& options, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Residual orders

inline constexpr std::array<int, 3> kSlavedModes = {2, 4, 6};

struct ResidualMeasure {
  std::array<double, 7> sup_residual{};    // sup_t |Res(k,t)|, k = 0..6
  std::array<double, 3> integrated{};      // sup_t |int e^{lambda(t-s)} eps^-3 Res_r(j,s) ds|, j = 2,4,6
  std::array<double, 3> integrated_drift{};  // part driven by amplitude motion and eps Y_j
  std::array<double, 3> integrated_noise{};  // part driven by the critical-mode noise increments
};

/// Integrates the noise lattice for `config`/`key` and returns the slow-mode history.
NoiseHistory record_noise(const SimConfig& config, NoiseKey key);

/// Residuals along the ansatz built from `amplitudes`, which must hold one
/// state per fast step (from integrate_amplitudes). Throws SequencingError otherwise.
ResidualMeasure ansatz_residuals(const SimConfig& config, NoiseKey key,
                                 const AmplitudeTrajectory& amplitudes);

struct OrderFit {
  double order = 0.0;
  bool vanishes = false;  // all medians below the round-off floor
};

struct ResidualRow {
  double eps = 0.0;
  int paths = 0;
  std::array<double, 7> sup_residual{};
  std::array<double, 3> integrated{};
  std::array<double, 3> integrated_drift{};
  std::array<double, 3> integrated_noise{};
};

struct ResidualOrderTable {
  std::vector<ResidualRow> rows;
  std::array<OrderFit, 7> residual_orders{};
  std::array<OrderFit, 3> integrated_orders{};
  std::array<OrderFit, 3> integrated_drift_orders{};
  std::array<OrderFit, 3> integrated_noise_orders{};
};

struct ResidualOptions {
  int paths = 8;
  int workers = 0;
};

ResidualOrderTable residual_order_study(const SimConfig& base, std::span<const double> eps_list,
                                        const ResidualOptions& options);

// ---------------------------------------------------------------------------
// OU statistics

struct MomentCheck {
  int k = 0;
  double t = 0.0;
  double empirical = 0.0;
  double expected = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

struct TailCheck {
  int k = 0;
  double t = 0.0;
  double threshold = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double binomial_se = 0.0;
  bool pass = false;
};

struct StationaryCheck {
  int k = 2;
  double t = 0.0;
  double empirical = 0.0;
  double expected = 0.0;
  double relative_error = 0.0;
  bool pass = false;
};

struct SupremumStatistic {
  double r = 2.0;
  double horizon = 0.0;
  int paths = 0;
  double mean = 0.0;
  double p95 = 0.0;  // estimate of C_Z^2 at delta = 0.05
};

struct OUCheckOptions {
  std::vector<int> moment_modes = {0, 1, 2, 3, 4, 5, 6, 10};
  std::vector<double> moment_times = {0.1, 1.0, 10.0};
  int moment_paths = 10000;
  std::vector<int> tail_modes = {1, 2, 5};
  std::vector<double> tail_multipliers = {0.25, 0.5, 1.0, 2.0};  // thresholds c = m * c_k
  double tail_horizon = 100.0;
  int tail_paths = 1000;
  double stationary_time = 10.0;
  double stationary_tolerance = 0.05;
  int supremum_paths = 200;
  int supremum_truncation = 32;
  double r = 2.0;
  double dt = 0.01;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct OUStatisticsReport {
  std::vector<MomentCheck> moments;
  std::vector<TailCheck> tails;
  StationaryCheck stationary;
  SupremumStatistic supremum;
  bool all_pass = false;
};

OUStatisticsReport ou_statistics_check(const NoiseScaling& scaling, const OUCheckOptions& options);

/// sup over [0, horizon] of sum_{|k| not in {1,3}} |Zhat_k(t)|^2 (1+k^2)^r for one path.
double weighted_noise_supremum(const NoiseScaling& scaling, int truncation, double horizon,
                               double dt, double r, NoiseKey key);

}  // namespace duks
