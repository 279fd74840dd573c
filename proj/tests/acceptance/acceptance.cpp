// One PASS/FAIL line per acceptance criterion. Tolerances are pinned here and
// the runs use the tool's defaults (the same maps `duks <subcommand>` builds).

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "duks/cli/commands.hpp"
#include "duks/cli/settings.hpp"
#include "duks/landau.hpp"
#include "duks/solver.hpp"
#include "duks/spectrum.hpp"
#include "duks/validate.hpp"
#include "oracles.hpp"

namespace {

using namespace duks;
namespace fs = std::filesystem;

// criterion 1
constexpr double kSlopeMin = 1.6;
constexpr double kSlopeMax = 2.4;
constexpr double kMinSuccess = 0.9;
constexpr double kC2Factor = 1.5;
constexpr int kScalingPaths = 32;
// criterion 2
constexpr double kMaxRSpread = 3.0;
// criterion 3
constexpr double kMomentSe = 3.0;
constexpr double kStationaryTol = 0.05;
// criterion 5
constexpr double kMinOrder = 3.5;
constexpr double kMinOrderMode5 = 2.5;
constexpr double kMinIntegratedOrder = 0.6;
// criterion 6
constexpr double kEliminationTol = 1e-13;
constexpr int kEliminationSamples = 1000;
// criterion 7
constexpr double kConvolutionTol = 1e-13;
constexpr double kLinearUlps = 4.0;
constexpr double kAlgebraBound = 10.0;
constexpr int kAlgebraPairs = 1000;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Line {
  int id;
  bool pass;
  std::string name;
  std::string detail;
};

void report(const Line& l) {
  std::printf("criterion %d %s  %s: %s\n", l.id, l.pass ? "PASS" : "FAIL", l.name.c_str(), l.detail.c_str());
  std::fflush(stdout);
}

cli::Settings defaults_for(const std::string& sub) { return cli::resolve_settings(cli::with_defaults({}, sub)); }

std::vector<Line> scaling_criteria() {
  const cli::Settings s = defaults_for("scaling");
  ScalingOptions o;
  o.paths = kScalingPaths;
  o.workers = s.workers;
  o.order = s.order;
  o.r = s.r;
  o.c2_factor = kC2Factor;
  o.bootstrap_resamples = s.bootstrap_resamples;
  const ScalingTable t = epsilon_scaling_study(s.sim, s.eps_list, o);

  std::size_t aborted = 0;
  for (const ErrorRecord& r : t.records) aborted += r.aborted ? 1 : 0;
  const double slope = t.sup_v_fit.slope;
  const bool slope_ok = t.sup_v_fit.valid && slope >= kSlopeMin && slope <= kSlopeMax;
  const bool coverage_ok = t.pooled_success_fraction >= kMinSuccess;
  std::string per_eps;
  for (const ScalingRow& row : t.rows) per_eps += (per_eps.empty() ? "" : "/") + fmt(row.success_fraction);

  Line one{1, slope_ok && coverage_ok && aborted == 0, "eps^2 scaling",
           "median E_sup_v slope " + fmt(slope) + " (window [" + fmt(kSlopeMin) + ", " + fmt(kSlopeMax) + "] " +
               (slope_ok ? "ok" : "missed") + "); P(E_sup_v <= C2 eps^2) = " + fmt(t.pooled_success_fraction) +
               " pooled (" + per_eps + " per eps, Wilson [" + fmt(t.pooled_success_wilson.lo) + ", " +
               fmt(t.pooled_success_wilson.hi) + "], need >= " + fmt(kMinSuccess) + " " +
               (coverage_ok ? "ok" : "missed") + "), C2 = " + fmt(t.c2) + ", M = " + std::to_string(o.paths) +
               ", aborted " + std::to_string(aborted)};

  std::string medians;
  for (const ScalingRow& row : t.rows) medians += (medians.empty() ? "" : "/") + fmt(row.error_r.median);
  Line two{2, t.error_r_spread < kMaxRSpread && aborted == 0, "error-variable boundedness",
           "median E_R " + medians + ", max/min " + fmt(t.error_r_spread) + " (need < " + fmt(kMaxRSpread) + ")"};
  return {one, two};
}

std::vector<Line> ou_criteria() {
  const cli::Settings s = defaults_for("ou-check");
  OUCheckOptions o = s.ou;
  o.stationary_tolerance = kStationaryTol;
  const OUStatisticsReport r = ou_statistics_check(s.sim.noise, o);

  int moments_ok = 0;
  double worst_z = 0.0;
  std::set<int> modes;
  for (const MomentCheck& m : r.moments) {
    const double z = m.std_error > 0.0 ? std::abs(m.empirical - m.expected) / m.std_error : 0.0;
    const bool ok = z <= kMomentSe;
    moments_ok += ok ? 1 : 0;
    worst_z = std::max(worst_z, z);
    modes.insert(m.k);
  }
  const bool moments_pass = moments_ok == static_cast<int>(r.moments.size());
  Line three{3, moments_pass && r.stationary.pass, "OU moments",
             std::to_string(moments_ok) + "/" + std::to_string(r.moments.size()) + " moments within " +
                 fmt(kMomentSe) + " se (worst " + fmt(worst_z) + " se, " + std::to_string(o.moment_paths) +
                 " paths, " + std::to_string(modes.size()) + " modes); k=2 stationary " +
                 fmt(r.stationary.empirical) + " vs alpha^2/450 = " + fmt(r.stationary.expected) + ", rel err " +
                 fmt(r.stationary.relative_error) + " (tol " + fmt(kStationaryTol) + ")"};

  int tails_ok = 0;
  double worst_margin = -1e300;
  for (const TailCheck& c : r.tails) {
    tails_ok += c.pass ? 1 : 0;
    if (c.binomial_se > 0.0) worst_margin = std::max(worst_margin, (c.empirical - c.bound) / c.binomial_se);
  }
  Line four{4, tails_ok == static_cast<int>(r.tails.size()), "tail bounds",
            std::to_string(tails_ok) + "/" + std::to_string(r.tails.size()) +
                " exceedance frequencies <= bound + 3 binomial se (k in {1,2,5}, " + std::to_string(o.tail_paths) +
                " paths, horizon " + fmt(o.tail_horizon) + ", largest (emp - bound)/se " + fmt(worst_margin) + ")"};
  return {three, four};
}

std::string order_text(const OrderFit& f) { return f.vanishes ? "vanishes" : fmt(f.order); }
bool order_at_least(const OrderFit& f, double min) { return f.vanishes || f.order >= min; }

Line residual_criterion() {
  const cli::Settings s = defaults_for("residuals");
  const ResidualOrderTable t = residual_order_study(s.sim, s.eps_list, {.paths = s.paths, .workers = s.workers});
  bool ok = true;
  std::string detail = "Res orders";
  for (const int k : {0, 1, 3, 5}) {
    const OrderFit& f = t.residual_orders[static_cast<std::size_t>(k)];
    ok = ok && order_at_least(f, k == 5 ? kMinOrderMode5 : kMinOrder);
    detail += " k=" + std::to_string(k) + ":" + order_text(f);
  }
  detail += " (need >= " + fmt(kMinOrder) + ", k=5 >= " + fmt(kMinOrderMode5) + "); integrated reduced residual orders";
  bool integrated_ok = true;
  for (std::size_t j = 0; j < 3; ++j) {
    integrated_ok = integrated_ok && order_at_least(t.integrated_orders[j], kMinIntegratedOrder);
    detail += " j=" + std::to_string(kSlavedModes[j]) + ":" + order_text(t.integrated_orders[j]);
  }
  detail += " (need >= " + fmt(kMinIntegratedOrder) + "; drift part";
  for (std::size_t j = 0; j < 3; ++j) detail += " " + order_text(t.integrated_drift_orders[j]);
  detail += ", noise part";
  for (std::size_t j = 0; j < 3; ++j) detail += " " + order_text(t.integrated_noise_orders[j]);
  detail += ")";
  return {5, ok && integrated_ok, "residual hierarchy", detail};
}

Line elimination_criterion() {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int i = 0; i < kEliminationSamples; ++i) {
    testing::Forcing f{g(rng), {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
    const Complex a1{g(rng), g(rng)}, a3{g(rng), g(rng)};
    SlowNoise z;
    z.z = {Complex{f.z0, 0.0}, f.z1, f.z2, f.z3, f.z4, Complex{}, f.z6};
    const testing::Rates ref = testing::expanded_amplitude_rhs(a1, a3, f);
    const AmplitudeRates got = rhs_amplitudes(a1, a3, z);
    worst = std::max({worst, std::abs(got.da1 - ref.da1) / std::abs(ref.da1),
                      std::abs(got.da3 - ref.da3) / std::abs(ref.da3)});
  }
  return {6, worst <= kEliminationTol, "elimination consistency",
          "max relative difference " + fmt(worst) + " over " + std::to_string(kEliminationSamples) +
              " samples (tol " + fmt(kEliminationTol) + ")"};
}

Line oracle_criterion() {
  // cos^2 x = 1/2 + cos(2x)/2 and cos^2 3x = 1/2 + cos(6x)/2
  double conv_err = 0.0;
  for (const int m : {1, 3}) {
    const SpectralField c = SpectralField::cosine(8, m, 0.5);
    const SpectralField sq = convolve(c, c);
    const auto brute = testing::brute_convolution({{m, 0.5}, {-m, 0.5}}, {{m, 0.5}, {-m, 0.5}}, 8);
    for (int k = -8; k <= 8; ++k) {
      const Complex expected = brute.contains(k) ? brute.at(k) : Complex{};
      conv_err = std::max(conv_err, std::abs(sq[k] - expected));
    }
  }

  // modes with 2k > N see no nonlinearity, so one step is exactly e^{mu h}
  double lin_ulps = 0.0;
  const double eps = 0.1;
  for (const double h : {1e-3, 1e-2, 0.3}) {
    for (int k = 1; k <= 8; ++k) {
      const int n = 2 * k - 1;
      SpectralField v(n);
      const Complex v0{0.7, 0.2};
      v.set(k, v0);
      const SpectralField next = step_v(v, SpectralField(n), eps, h);
      const Complex expected = std::exp((symbol_lambda(k) + eps * eps) * h) * v0;
      const double scale = std::max(std::abs(expected), DBL_MIN);
      lin_ulps = std::max(lin_ulps, std::abs(next[k] - expected) / (scale * DBL_EPSILON));
    }
  }

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const WeightedNormParams r2 = WeightedNormParams::checked(2.0);
  double worst = 0.0;
  for (int trial = 0; trial < kAlgebraPairs; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 64);
    SpectralField a(n), b(n);
    a.set(0, {g(rng), 0.0});
    b.set(0, {g(rng), 0.0});
    const double da = 0.5 * (trial % 3), db = 0.5 * (trial % 2);
    for (int k = 1; k <= n; ++k) {
      a.set(k, Complex{g(rng), g(rng)} / std::pow(1.0 + k * k, da));
      b.set(k, Complex{g(rng), g(rng)} / std::pow(1.0 + k * k, db));
    }
    worst = std::max(worst, weighted_norm(convolve(a, b), r2) / (weighted_norm(a, r2) * weighted_norm(b, r2)));
  }

  const bool ok = conv_err <= kConvolutionTol && lin_ulps <= kLinearUlps && worst <= kAlgebraBound;
  return {7, ok, "oracle equivalences",
          "cos^2 convolution error " + fmt(conv_err) + " (tol " + fmt(kConvolutionTol) +
              "); exponential-Euler linear step off by " + fmt(lin_ulps) + " ulp (tol " + fmt(kLinearUlps) +
              "); l2_2 algebra constant " + fmt(worst) + " over " + std::to_string(kAlgebraPairs) +
              " pairs (bound " + fmt(kAlgebraBound) + ")"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every output but the manifest must match byte for byte.
bool same_outputs(const cli::RunOutcome& a, const fs::path& da, const cli::RunOutcome& b, const fs::path& db) {
  if (a.outputs != b.outputs || a.exit_code != b.exit_code) return false;
  for (const std::string& f : a.outputs) {
    if (slurp(da / f) != slurp(db / f)) return false;
  }
  return true;
}

Line determinism_criterion() {
  const fs::path root = fs::temp_directory_path() / "duks_acceptance_determinism";
  fs::remove_all(root);
  int identical = 0;
  int total = 0;
  std::string detail;

  const auto rerun_check = [&](const std::string& sub, cli::ConfigMap map) {
    const fs::path first = root / (sub + "_a"), second = root / (sub + "_b");
    const cli::RunOutcome a = cli::run_command({sub, cli::with_defaults(std::move(map), sub), first, false});
    const cli::RunOutcome b = cli::run_command(cli::request_from_manifest(first / cli::kManifestName, second));
    ++total;
    if (same_outputs(a, first, b, second)) ++identical;
  };
  rerun_check("simulate", {{"seed", "7"}});
  rerun_check("scaling", {{"paths", "4"}});
  rerun_check("residuals", {{"paths", "2"}});
  rerun_check("ou-check", {{"ou.moment_paths", "200"}, {"ou.tail_paths", "50"}, {"ou.supremum_paths", "5"}});
  detail = std::to_string(identical) + "/" + std::to_string(total) + " manifest reruns byte-identical";

  const fs::path w1 = root / "workers_1", w4 = root / "workers_4";
  const cli::RunOutcome one = cli::run_command({"scaling", cli::with_defaults({{"paths", "6"}, {"workers", "1"}}, "scaling"), w1, false});
  const cli::RunOutcome four = cli::run_command({"scaling", cli::with_defaults({{"paths", "6"}, {"workers", "4"}}, "scaling"), w4, false});
  const bool workers_ok = same_outputs(one, w1, four, w4);
  detail += "; scaling ensemble with workers 1 vs 4 " + std::string(workers_ok ? "identical" : "differs");
  fs::remove_all(root);
  return {8, identical == total && workers_ok, "determinism", detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria (1-8)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  const auto wanted = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  bool all = true;
  const auto emit = [&](const Line& l) {
    report(l);
    all = all && l.pass;
  };
  try {
    if (wanted(1) || wanted(2)) {
      for (const Line& l : scaling_criteria()) {
        if (wanted(l.id)) emit(l);
      }
    }
    if (wanted(3) || wanted(4)) {
      for (const Line& l : ou_criteria()) {
        if (wanted(l.id)) emit(l);
      }
    }
    if (wanted(5)) emit(residual_criterion());
    if (wanted(6)) emit(elimination_criterion());
    if (wanted(7)) emit(oracle_criterion());
    if (wanted(8)) emit(determinism_criterion());
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  return all ? 0 : 1;
}
