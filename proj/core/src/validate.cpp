#include "duks/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <string>

#include "duks/error.hpp"
#include "duks/parallel.hpp"

namespace duks {

namespace {

constexpr Complex kI{0.0, 1.0};

bool is_ansatz_stable_mode(int k) {
  const int a = k < 0 ? -k : k;
  return a == 2 || a == 4 || a == 6;
}

std::vector<double> finite_values(std::span<const ErrorRecord> records, double eps,
                                  double ErrorRecord::*field) {
  std::vector<double> out;
  for (const ErrorRecord& r : records) {
    if (!r.aborted && r.eps == eps) out.push_back(r.*field);
  }
  return out;
}

MetricSummary summarize(const std::vector<double>& values, int resamples, std::uint64_t seed) {
  MetricSummary s;
  if (values.empty()) return s;
  s.median = quantile(values, 0.5);
  s.p95 = quantile(values, 0.95);
  s.median_se = bootstrap_quantile_se(values, 0.5, resamples, seed);
  return s;
}

// Drift-only time derivative of the slaved modes: chain rule through (A1, A3)
// with the noise held fixed.
SlavedModes slaved_drift(Complex a1, Complex a3, const SlowNoise& z, const AmplitudeRates& rates) {
  const Complex y1 = z(1) + a1;
  const Complex y3 = z(3) + a3;
  const Complex d1 = rates.da1;
  const Complex d3 = rates.da3;
  return {
      -(4.0 * kI * y1 * d1 + 4.0 * kI * d3 * std::conj(y1) + 4.0 * kI * y3 * std::conj(d1)) /
          symbol_lambda(2),
      -(8.0 * kI * (d3 * y1 + y3 * d1)) / symbol_lambda(4),
      -(12.0 * kI * y3 * d3) / symbol_lambda(6),
  };
}

Complex slaved_component(const SlavedModes& s, std::size_t index) {
  return index == 0 ? s.a2 : index == 1 ? s.a4 : s.a6;
}

OrderFit fit_order(std::span<const double> eps, std::span<const double> medians) {
  OrderFit fit;
  bool all_tiny = true;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (medians[i] > 1e-12 * eps[i] * eps[i] * eps[i]) all_tiny = false;
  }
  if (all_tiny) {
    fit.vanishes = true;
    fit.order = std::numeric_limits<double>::infinity();
    return fit;
  }
  const SlopeFit s = fit_loglog(eps, medians);
  fit.order = s.valid ? s.slope : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

}  // namespace

// ---------------------------------------------------------------------------

SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_loglog: need >= 2 paired points");
  SlopeFit fit;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("fit_loglog: abscissae must be positive");
    if (!(y[i] > 0.0)) return fit;
  }
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("fit_loglog: abscissae must not all coincide");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.valid = true;
  return fit;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double bootstrap_quantile_se(std::span<const double> values, double q, int resamples,
                             std::uint64_t seed) {
  if (values.size() < 2 || resamples < 2) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> estimates(static_cast<std::size_t>(resamples));
  std::vector<double> sample(values.size());
  for (double& estimate : estimates) {
    for (double& s : sample) s = values[pick(rng)];
    estimate = quantile(sample, q);
  }
  const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / resamples;
  double var = 0.0;
  for (const double e : estimates) var += (e - mean) * (e - mean);
  return std::sqrt(var / (resamples - 1));
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const auto n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

// ---------------------------------------------------------------------------

SpectralField error_variables(const SpectralField& v, const AmplitudeState& amp, double eps) {
  const int n = v.truncation();
  const double eps2 = eps * eps;
  const double eps3 = eps2 * eps;
  SpectralField r(n);
  for (int k = -n; k <= n; ++k) {
    if (is_critical_mode(k)) {
      r.raw(k) = (v[k] - eps * amp.amplitude(k)) / eps2;
    } else if (is_ansatz_stable_mode(k)) {
      r.raw(k) = (v[k] - eps2 * amp.amplitude(k)) / eps3;
    } else {
      r.raw(k) = v[k] / eps3;
    }
  }
  return r;
}

ErrorRecord pathwise_error(const Trajectory& traj, const AmplitudeTrajectory& amp, double eps,
                           const WeightedNormParams& norm, ApproxOrder order) {
  if (traj.steps != amp.steps || traj.v.size() != amp.states.size()) {
    throw SequencingError("pathwise_error: full and amplitude trajectories are sampled on different grids");
  }
  if (traj.v.empty()) throw SequencingError("pathwise_error: empty trajectory");
  const int n = traj.v.front().truncation();
  const int grid = 8 * n;
  const double eps2 = eps * eps;
  const double eps3 = eps2 * eps;

  ErrorRecord rec;
  rec.eps = eps;
  for (std::size_t i = 0; i < traj.v.size(); ++i) {
    const AmplitudeState& a = amp.states[i];
    const SpectralField r = error_variables(traj.v[i], a, eps);

    double crit = 0.0;
    double stable = 0.0;
    double l1 = 0.0;
    for (int k = -n; k <= n; ++k) {
      const double w = std::norm(r[k]) * std::pow(1.0 + static_cast<double>(k) * k, norm.r);
      if (is_critical_mode(k)) {
        crit += w;
        l1 += eps2 * std::abs(r[k]);
      } else {
        stable += w;
        l1 += eps3 * std::abs(r[k]);
        if (order == ApproxOrder::first && is_ansatz_stable_mode(k)) l1 += eps2 * std::abs(a.amplitude(k));
      }
    }
    rec.error_r = std::max(rec.error_r, std::sqrt(crit + stable));
    rec.error_r_critical = std::max(rec.error_r_critical, std::sqrt(crit));
    rec.error_r_stable = std::max(rec.error_r_stable, std::sqrt(stable));
    rec.sup_v_l1_bound = std::max(rec.sup_v_l1_bound, l1);

    const SpectralField diff_v = traj.v[i] - reconstruct_approximation(a, eps, order, n);
    rec.sup_v = std::max(rec.sup_v, sup_norm_estimate(diff_v, grid).grid_max);
    const SpectralField diff_u = traj.u(i) - reconstruct_approximation(a, eps, ApproxOrder::first, n);
    rec.sup_u = std::max(rec.sup_u, sup_norm_estimate(diff_u, grid).grid_max);
  }
  return rec;
}

ErrorRecord run_coupled_path(const SimConfig& config, NoiseKey key, const WeightedNormParams& norm,
                             ApproxOrder order) {
  ErrorRecord rec;
  try {
    const Trajectory traj = simulate_path(config, key);
    const AmplitudeTrajectory amp = integrate_amplitudes(config.a1, config.a3, traj.noise, traj.steps);
    rec = pathwise_error(traj, amp, config.eps, norm, order);
  } catch (const DivergenceError& e) {
    rec = ErrorRecord{};
    rec.aborted = true;
    rec.abort_reason = e.what();
  }
  rec.eps = config.eps;
  rec.seed = key.seed;
  rec.path = key.path;
  return rec;
}

// ---------------------------------------------------------------------------

double success_fraction(std::span<const ErrorRecord> records, double c2) {
  std::size_t ok = 0;
  std::size_t total = 0;
  for (const ErrorRecord& r : records) {
    if (r.aborted) continue;
    ++total;
    if (r.sup_v <= c2 * r.eps * r.eps) ++ok;
  }
  return total == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(total);
}

ScalingTable summarize_scaling(std::vector<ErrorRecord> records, std::span<const double> eps_list,
                               const ScalingOptions& options, std::uint64_t seed) {
  ScalingTable table;
  table.records = std::move(records);

  std::vector<double> eps_sorted(eps_list.begin(), eps_list.end());
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
  std::vector<double> med_v, med_u, med_r;
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    const double eps = eps_list[e];
    ScalingRow row;
    row.eps = eps;
    for (const ErrorRecord& r : table.records) {
      if (r.eps != eps) continue;
      ++row.paths;
      if (r.aborted) ++row.aborted;
    }
    const std::uint64_t row_seed = seed * 1000003u + e;
    row.sup_v = summarize(finite_values(table.records, eps, &ErrorRecord::sup_v), options.bootstrap_resamples, row_seed);
    row.sup_u = summarize(finite_values(table.records, eps, &ErrorRecord::sup_u), options.bootstrap_resamples, row_seed + 1);
    row.error_r = summarize(finite_values(table.records, eps, &ErrorRecord::error_r), options.bootstrap_resamples, row_seed + 2);
    med_v.push_back(row.sup_v.median);
    med_u.push_back(row.sup_u.median);
    med_r.push_back(row.error_r.median);
    table.rows.push_back(row);
  }

  table.sup_v_fit = fit_loglog(eps_list, med_v);
  table.sup_u_fit = fit_loglog(eps_list, med_u);
  table.error_r_fit = fit_loglog(eps_list, med_r);

  // C2 is calibrated at the largest eps so that C2 eps_max^2 = factor * median E_sup_v there.
  const double eps_max = eps_sorted.front();
  double median_at_max = 0.0;
  for (const ScalingRow& row : table.rows) {
    if (row.eps == eps_max) median_at_max = row.sup_v.median;
  }
  table.c2 = options.c2_factor * median_at_max / (eps_max * eps_max);

  std::size_t pooled_ok = 0;
  std::size_t pooled_total = 0;
  for (ScalingRow& row : table.rows) {
    std::size_t ok = 0;
    std::size_t total = 0;
    for (const ErrorRecord& r : table.records) {
      if (r.eps != row.eps || r.aborted) continue;
      ++total;
      if (r.sup_v <= table.c2 * r.eps * r.eps) ++ok;
    }
    row.success_fraction = total == 0 ? 0.0 : static_cast<double>(ok) / static_cast<double>(total);
    row.success_wilson = wilson_interval(ok, total);
    pooled_ok += ok;
    pooled_total += total;
  }
  table.pooled_success_fraction =
      pooled_total == 0 ? 0.0 : static_cast<double>(pooled_ok) / static_cast<double>(pooled_total);
  table.pooled_success_wilson = wilson_interval(pooled_ok, pooled_total);

  const auto [lo, hi] = std::minmax_element(med_r.begin(), med_r.end());
  table.error_r_spread = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  if (*hi == 0.0) table.error_r_spread = 1.0;
  return table;
}

ScalingTable epsilon_scaling_study(const SimConfig& base, std::span<const double> eps_list,
                                   const ScalingOptions& options) {
  std::vector<double> distinct(eps_list.begin(), eps_list.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw ConfigError("epsilon_scaling_study: at least 3 distinct eps values are required");
  if (options.paths < 1) throw ConfigError("epsilon_scaling_study: paths must be positive");
  const WeightedNormParams norm = WeightedNormParams::checked(options.r);
  for (const double eps : eps_list) base.with_eps(eps).validate();

  const auto m = static_cast<std::size_t>(options.paths);
  std::vector<ErrorRecord> records(eps_list.size() * m);
  std::mutex progress_mutex;
  parallel_for(records.size(), options.workers, [&](std::size_t task) {
    const double eps = eps_list[task / m];
    const std::uint64_t path = task % m;
    records[task] = run_coupled_path(base.with_eps(eps), NoiseKey{base.seed, path}, norm, options.order);
    if (options.progress) {
      std::lock_guard lock(progress_mutex);
      options.progress(eps, path);
    }
  });
  return summarize_scaling(std::move(records), eps_list, options, base.seed);
}

// ---------------------------------------------------------------------------

NoiseHistory record_noise(const SimConfig& config, NoiseKey key) {
  config.validate();
  NoiseHistory history;
  history.eps = config.eps;
  history.dt = config.dt;
  const std::int64_t total = config.fast_steps();
  history.samples.reserve(static_cast<std::size_t>(total) + 1);
  OULattice lattice(config.modes, key);
  history.samples.push_back(SlowNoise::from_lattice(lattice));
  for (std::int64_t n = 0; n < total; ++n) {
    lattice.advance(config.noise, config.dt);
    history.samples.push_back(SlowNoise::from_lattice(lattice));
  }
  return history;
}

ResidualMeasure ansatz_residuals(const SimConfig& config, NoiseKey key,
                                 const AmplitudeTrajectory& amplitudes) {
  config.validate();
  const std::int64_t total = config.fast_steps();
  if (amplitudes.states.size() != static_cast<std::size_t>(total) + 1) {
    throw SequencingError("ansatz_residuals: the amplitude stage has not been run on every fast step (" +
                          std::to_string(amplitudes.states.size()) + " states for " +
                          std::to_string(total + 1) + " grid points)");
  }
  for (std::size_t i = 0; i < amplitudes.steps.size(); ++i) {
    if (amplitudes.steps[i] != static_cast<std::int64_t>(i)) {
      throw SequencingError("ansatz_residuals: amplitude samples are not on consecutive fast steps");
    }
  }

  const double eps = config.eps;
  const double eps2 = eps * eps;
  const double eps3 = eps2 * eps;
  const double eps4 = eps2 * eps2;
  const double h = config.dt;
  const int n = config.modes;

  std::array<double, 3> decay{};
  std::array<double, 3> weight{};
  for (std::size_t j = 0; j < 3; ++j) {
    const double lambda = symbol_lambda(kSlavedModes[j]);
    decay[j] = std::exp(lambda * h);
    weight[j] = phi1(lambda * h);
  }
  std::array<Complex, 3> integ{}, integ_drift{}, integ_noise{};

  ResidualMeasure out;
  OULattice lattice(n, key);
  SlowNoise z_now = SlowNoise::from_lattice(lattice);
  for (std::int64_t step = 0;; ++step) {
    const AmplitudeState& a = amplitudes.states[static_cast<std::size_t>(step)];
    const AmplitudeRates rates = rhs_amplitudes(a.a1, a.a3, z_now);
    const SlavedModes drift = slaved_drift(a.a1, a.a3, z_now, rates);

    SpectralField dv_dt(n);
    dv_dt.set(1, eps3 * rates.da1);
    dv_dt.set(3, eps3 * rates.da3);
    dv_dt.set(2, eps4 * drift.a2);
    dv_dt.set(4, eps4 * drift.a4);
    dv_dt.set(6, eps4 * drift.a6);
    const SpectralField ansatz = reconstruct_approximation(a, eps, ApproxOrder::second, n);
    const SpectralField res = full_residual(ansatz, lattice.values(), eps, dv_dt);
    for (int k = 0; k <= 6; ++k) {
      auto& slot = out.sup_residual[static_cast<std::size_t>(k)];
      slot = std::max(slot, std::abs(res[k]));
    }
    if (step == total) break;

    lattice.advance(config.noise, h);
    const SlowNoise z_next = SlowNoise::from_lattice(lattice);
    const AmplitudeState& b = amplitudes.states[static_cast<std::size_t>(step + 1)];
    // A_j(step+1) - A_j(step) split into the move of (A1, A3) at frozen noise
    // and the noise increment at the new amplitudes.
    const SlavedModes moved = slaved_modes(b.a1, b.a3, z_now);
    for (std::size_t j = 0; j < 3; ++j) {
      const Complex y = slaved_component(a.slaved, j) + z_now(kSlavedModes[j]);
      const Complex d_amp = slaved_component(moved, j) - slaved_component(a.slaved, j);
      const Complex d_noise = slaved_component(b.slaved, j) - slaved_component(moved, j);
      const Complex inc_drift = weight[j] * (h * eps * y - d_amp / eps);
      const Complex inc_noise = weight[j] * (-d_noise / eps);
      integ_drift[j] = decay[j] * integ_drift[j] + inc_drift;
      integ_noise[j] = decay[j] * integ_noise[j] + inc_noise;
      integ[j] = decay[j] * integ[j] + inc_drift + inc_noise;
      out.integrated[j] = std::max(out.integrated[j], std::abs(integ[j]));
      out.integrated_drift[j] = std::max(out.integrated_drift[j], std::abs(integ_drift[j]));
      out.integrated_noise[j] = std::max(out.integrated_noise[j], std::abs(integ_noise[j]));
    }
    z_now = z_next;
  }
  return out;
}

ResidualOrderTable residual_order_study(const SimConfig& base, std::span<const double> eps_list,
                                        const ResidualOptions& options) {
  if (eps_list.size() < 3) throw ConfigError("residual_order_study: at least 3 eps values are required");
  if (options.paths < 1) throw ConfigError("residual_order_study: paths must be positive");
  for (const double eps : eps_list) base.with_eps(eps).validate();

  const auto m = static_cast<std::size_t>(options.paths);
  std::vector<ResidualMeasure> measures(eps_list.size() * m);
  parallel_for(measures.size(), options.workers, [&](std::size_t task) {
    const SimConfig cfg = base.with_eps(eps_list[task / m]);
    const NoiseKey key{base.seed, task % m};
    const NoiseHistory noise = record_noise(cfg, key);
    std::vector<std::int64_t> every(noise.samples.size());
    std::iota(every.begin(), every.end(), std::int64_t{0});
    const AmplitudeTrajectory amp = integrate_amplitudes(cfg.a1, cfg.a3, noise, every);
    measures[task] = ansatz_residuals(cfg, key, amp);
  });

  ResidualOrderTable table;
  const auto median_of = [&](std::size_t e, auto&& pick) {
    std::vector<double> values;
    for (std::size_t p = 0; p < m; ++p) values.push_back(pick(measures[e * m + p]));
    return quantile(values, 0.5);
  };
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    ResidualRow row;
    row.eps = eps_list[e];
    row.paths = options.paths;
    for (std::size_t k = 0; k < 7; ++k) {
      row.sup_residual[k] = median_of(e, [k](const ResidualMeasure& r) { return r.sup_residual[k]; });
    }
    for (std::size_t j = 0; j < 3; ++j) {
      row.integrated[j] = median_of(e, [j](const ResidualMeasure& r) { return r.integrated[j]; });
      row.integrated_drift[j] = median_of(e, [j](const ResidualMeasure& r) { return r.integrated_drift[j]; });
      row.integrated_noise[j] = median_of(e, [j](const ResidualMeasure& r) { return r.integrated_noise[j]; });
    }
    table.rows.push_back(row);
  }

  const auto column = [&](auto&& pick) {
    std::vector<double> values;
    for (const ResidualRow& row : table.rows) values.push_back(pick(row));
    return values;
  };
  for (std::size_t k = 0; k < 7; ++k) {
    table.residual_orders[k] = fit_order(eps_list, column([k](const ResidualRow& r) { return r.sup_residual[k]; }));
  }
  for (std::size_t j = 0; j < 3; ++j) {
    table.integrated_orders[j] = fit_order(eps_list, column([j](const ResidualRow& r) { return r.integrated[j]; }));
    table.integrated_drift_orders[j] = fit_order(eps_list, column([j](const ResidualRow& r) { return r.integrated_drift[j]; }));
    table.integrated_noise_orders[j] = fit_order(eps_list, column([j](const ResidualRow& r) { return r.integrated_noise[j]; }));
  }
  return table;
}

// ---------------------------------------------------------------------------

double weighted_noise_supremum(const NoiseScaling& scaling, int truncation, double horizon,
                               double dt, double r, NoiseKey key) {
  OULattice lattice(truncation, key);
  const std::int64_t steps = std::llround(horizon / dt);
  std::vector<double> weights(static_cast<std::size_t>(truncation) + 1);
  for (int k = 0; k <= truncation; ++k) {
    weights[static_cast<std::size_t>(k)] = std::pow(1.0 + static_cast<double>(k) * k, r);
  }
  double best = 0.0;
  for (std::int64_t n = 0; n < steps; ++n) {
    lattice.advance(scaling, dt);
    const SpectralField& z = lattice.normalized();
    double total = std::norm(z[0]) * weights[0];
    for (int k = 1; k <= truncation; ++k) {
      if (!is_critical_mode(k)) total += 2.0 * std::norm(z[k]) * weights[static_cast<std::size_t>(k)];
    }
    best = std::max(best, total);
  }
  return best;
}

OUStatisticsReport ou_statistics_check(const NoiseScaling& scaling, const OUCheckOptions& options) {
  if (options.moment_paths < 2 || options.tail_paths < 1) throw ConfigError("ou_statistics_check: too few paths");
  if (!(options.dt > 0.0)) throw ConfigError("ou_statistics_check: dt must be positive");

  std::vector<double> times = options.moment_times;
  const bool stationary_extra =
      std::find(times.begin(), times.end(), options.stationary_time) == times.end();
  if (stationary_extra) times.push_back(options.stationary_time);
  std::vector<std::int64_t> time_steps;
  for (const double t : times) time_steps.push_back(std::llround(t / options.dt));
  const std::int64_t last_step = *std::max_element(time_steps.begin(), time_steps.end());

  std::vector<int> modes = options.moment_modes;
  if (std::find(modes.begin(), modes.end(), 2) == modes.end()) modes.push_back(2);

  // moments: [path][mode][time] -> |Z|^2
  const std::size_t nm = modes.size();
  const std::size_t nt = times.size();
  const auto mp = static_cast<std::size_t>(options.moment_paths);
  std::vector<double> squares(mp * nm * nt);
  parallel_for(mp, options.workers, [&](std::size_t p) {
    const NoiseKey key{options.seed, p};
    for (std::size_t mi = 0; mi < nm; ++mi) {
      const int k = modes[mi];
      const OUTransition tr = OUTransition::exact(symbol_lambda(k), options.dt);
      const double alpha = scaling.alpha(k);
      Complex z{};
      for (std::int64_t n = 0; n < last_step; ++n) {
        z = tr.decay * z;
        if (alpha != 0.0) z += alpha * tr.spread * complex_gaussian(key, k, static_cast<std::uint64_t>(n));
        for (std::size_t ti = 0; ti < nt; ++ti) {
          if (time_steps[ti] == n + 1) squares[(p * nm + mi) * nt + ti] = std::norm(z);
        }
      }
    }
  });

  OUStatisticsReport report;
  report.all_pass = true;
  const auto moment_stats = [&](std::size_t mi, std::size_t ti) {
    double sum = 0.0;
    for (std::size_t p = 0; p < mp; ++p) sum += squares[(p * nm + mi) * nt + ti];
    const double mean = sum / static_cast<double>(mp);
    double var = 0.0;
    for (std::size_t p = 0; p < mp; ++p) {
      const double d = squares[(p * nm + mi) * nt + ti] - mean;
      var += d * d;
    }
    var /= static_cast<double>(mp - 1);
    return std::pair{mean, std::sqrt(var / static_cast<double>(mp))};
  };
  for (std::size_t mi = 0; mi < options.moment_modes.size(); ++mi) {
    for (std::size_t ti = 0; ti < options.moment_times.size(); ++ti) {
      MomentCheck c;
      c.k = modes[mi];
      c.t = times[ti];
      std::tie(c.empirical, c.std_error) = moment_stats(mi, ti);
      c.expected = ou_second_moment(c.k, static_cast<double>(time_steps[ti]) * options.dt, scaling);
      c.pass = std::abs(c.empirical - c.expected) <= 3.0 * c.std_error;
      report.all_pass = report.all_pass && c.pass;
      report.moments.push_back(c);
    }
  }
  {
    const auto mi = static_cast<std::size_t>(std::find(modes.begin(), modes.end(), 2) - modes.begin());
    const auto ti = static_cast<std::size_t>(std::find(times.begin(), times.end(), options.stationary_time) - times.begin());
    StationaryCheck& s = report.stationary;
    s.k = 2;
    s.t = options.stationary_time;
    s.empirical = moment_stats(mi, ti).first;
    const double alpha = scaling.alpha(2);
    s.expected = alpha * alpha / (2.0 * std::abs(symbol_lambda(2)));
    s.relative_error = s.expected == 0.0 ? (s.empirical == 0.0 ? 0.0 : 1.0)
                                         : std::abs(s.empirical - s.expected) / s.expected;
    s.pass = s.relative_error <= options.stationary_tolerance;
    report.all_pass = report.all_pass && s.pass;
  }

  // tails: running sup of |Z(k, .)| on the dt grid over [0, tail_horizon]
  const auto tp = static_cast<std::size_t>(options.tail_paths);
  const std::size_t nk = options.tail_modes.size();
  const std::int64_t tail_steps = std::llround(options.tail_horizon / options.dt);
  std::vector<double> sups(tp * nk);
  parallel_for(tp, options.workers, [&](std::size_t p) {
    const NoiseKey key{options.seed, p};
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const int k = options.tail_modes[ki];
      const OUTransition tr = OUTransition::exact(symbol_lambda(k), options.dt);
      const double alpha = scaling.alpha(k);
      Complex z{};
      double best = 0.0;
      for (std::int64_t n = 0; n < tail_steps; ++n) {
        z = tr.decay * z;
        if (alpha != 0.0) z += alpha * tr.spread * complex_gaussian(key, k, static_cast<std::uint64_t>(n));
        best = std::max(best, std::abs(z));
      }
      sups[p * nk + ki] = best;
    }
  });
  for (std::size_t ki = 0; ki < nk; ++ki) {
    const int k = options.tail_modes[ki];
    for (const double mult : options.tail_multipliers) {
      TailCheck c;
      c.k = k;
      c.t = static_cast<double>(tail_steps) * options.dt;
      c.threshold = mult * scaling.c(k);
      std::size_t hits = 0;
      for (std::size_t p = 0; p < tp; ++p) {
        if (sups[p * nk + ki] >= c.threshold) ++hits;
      }
      c.empirical = static_cast<double>(hits) / static_cast<double>(tp);
      c.bound = tail_bound(k, c.t, c.threshold, scaling);
      c.binomial_se = std::sqrt(c.bound * (1.0 - c.bound) / static_cast<double>(tp));
      c.pass = c.empirical <= c.bound + 3.0 * c.binomial_se;
      report.all_pass = report.all_pass && c.pass;
      report.tails.push_back(c);
    }
  }

  // weighted supremum statistic (estimate of C_Z^2)
  if (options.supremum_paths > 0) {
    const auto sp = static_cast<std::size_t>(options.supremum_paths);
    std::vector<double> stats(sp);
    parallel_for(sp, options.workers, [&](std::size_t p) {
      stats[p] = weighted_noise_supremum(scaling, options.supremum_truncation, options.tail_horizon,
                                         options.dt, options.r, NoiseKey{options.seed, p});
    });
    SupremumStatistic& s = report.supremum;
    s.r = options.r;
    s.horizon = options.tail_horizon;
    s.paths = options.supremum_paths;
    s.mean = std::accumulate(stats.begin(), stats.end(), 0.0) / static_cast<double>(sp);
    s.p95 = quantile(stats, 0.95);
  }
  return report;
}

}  // namespace duks
