// Acceptance suite: end-to-end checks of the library's numerical
// contracts, run as one binary that prints one PASS/FAIL line per
// criterion and exits nonzero if any fail.
//
//   1. shot-noise constant sigma_f against an independent hand evaluation
//   2. noise-free round-trip inversion over +-1000 m/s^2
//   3. windowed unwrap == exhaustive brute-force oracle
//   4. exact recovery whenever the classical error is under half the
//      minimum candidate gap
//   5. single-shot histogram statistics per noise mode
//   6. fused navigation beats classical-only, and the constant-bias
//      closed form b*t^2/2 holds
//   7. quadrature fusion keeps the per-epoch acceleration RMSE at the
//      shot-noise floor with no significant growth over 30 minutes
//   8. byte-identical outputs from the CLI across worker counts

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qfuse/qfuse.hpp"

namespace fs = std::filesystem;
using namespace qfuse;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

QuantumSensorConfig reference_quantum() {
  QuantumSensorConfig cfg;
  cfg.n_atoms = 1000.0;
  cfg.wavelength = 780e-9;
  cfg.half_interrogation = 1e-3;
  cfg.pulse_width = 1e-6;
  cfg.initial_phase = 0.0;
  cfg.sample_period = 1.0;
  return cfg;
}

// Criterion 1: sigma_f = 1/(k_eff T^2 sqrt(N)), evaluated here from
// scratch, within 1e-6 relative of the library value.
Outcome criterion_shot_noise_constant() {
  const double hand = 1.0 / ((4.0 * M_PI / 780e-9) * (1e-3 * 1e-3) * std::sqrt(1000.0));
  const double lib = shot_noise_sigma(reference_quantum());
  const double rel = std::fabs(lib - hand) / hand;
  const double rel_printed = std::fabs(lib - 1.9628e-3) / 1.9628e-3;
  const bool pass = rel <= 1e-6 && rel_printed <= 1e-4;
  return {pass, "sigma_f=" + fmt(lib) + " m/s^2, rel err vs hand evaluation " + fmt(rel)};
}

// Criterion 2: 1e5 uniform draws over +-1000 m/s^2, noise-free unwrap
// with a_c = a recovers a within 1e-9 relative on every draw.
Outcome criterion_round_trip() {
  const QuantumSensorConfig quantum = reference_quantum();
  const FusionConfig fusion;
  RandomStream rng(20240901);
  long failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double a = rng.uniform(-1000.0, 1000.0);
    const UnwrapResult res = unwrap(quantum, fusion, quantum_signal(quantum, a), a);
    const double rel = std::fabs(res.a_f - a) / std::fabs(a);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-9)) ++failures;
  }
  return {failures == 0,
          "100000 draws, failures=" + std::to_string(failures) + ", worst rel err " + fmt(worst)};
}

// Criterion 3: windowed search (W = 2) against the exhaustive oracle on
// 1e4 random (acceleration, classical-error) pairs.
Outcome criterion_oracle_equivalence() {
  const QuantumSensorConfig quantum = reference_quantum();
  FusionConfig fusion;
  fusion.window_halfwidth = 2;
  RandomStream rng(20240902);
  long mismatches = 0;
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.uniform(-1000.0, 1000.0);
    const double delta = rng.uniform(-0.05, 0.05);
    const double s = quantum_signal(quantum, a);
    const UnwrapResult fast = unwrap(quantum, fusion, s, a + delta);
    const UnwrapResult slow = brute_force_unwrap(quantum, s, a + delta, 1001.0);
    if (fast.a_f != slow.a_f || fast.branch.sign != slow.branch.sign ||
        fast.branch.winding != slow.branch.winding)
      ++mismatches;
  }
  return {mismatches == 0, "10000 trials, mismatches=" + std::to_string(mismatches)};
}

// Criterion 4: with the classical error below half the minimum candidate
// gap, the true candidate is always recovered. The gap is computed from
// the enumerated candidate grid, not from the search under test.
Outcome criterion_selection_robustness() {
  const QuantumSensorConfig quantum = reference_quantum();
  const FusionConfig fusion;
  const double scale = scale_factor(quantum);
  const double period = 2.0 * M_PI / scale;
  long failures = 0;
  long trials = 0;

  auto min_gap = [&](double signal, double center) {
    std::vector<double> grid;
    const auto lo_n = static_cast<long>(std::floor((center - 3.0 * period) / period)) - 2;
    const auto hi_n = static_cast<long>(std::ceil((center + 3.0 * period) / period)) + 2;
    for (long n = lo_n; n <= hi_n; ++n)
      for (int s : {+1, -1}) grid.push_back(candidate_acceleration(quantum, signal, {s, n}));
    std::sort(grid.begin(), grid.end());
    double gap = period;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double d = grid[i] - grid[i - 1];
      if (d > 1e-9 * period) gap = std::min(gap, d);
    }
    return gap;
  };

  for (int step = 0; step <= 160; ++step) {
    const double theta = -M_PI + 2.0 * M_PI * step / 160.0;
    for (long winding : {-5L, 0L, 11L}) {
      const double a_true = (theta + 2.0 * M_PI * static_cast<double>(winding)) / scale;
      const double s = quantum_signal(quantum, a_true);
      const double gap = min_gap(s, a_true);
      for (double frac : {-0.49, -0.3, -0.1, 0.1, 0.3, 0.49}) {
        ++trials;
        const UnwrapResult res = unwrap(quantum, fusion, s, a_true + frac * gap);
        if (std::fabs(res.a_f - a_true) > 1e-12 * (1.0 + std::fabs(a_true))) ++failures;
      }
    }
  }
  return {failures == 0,
          std::to_string(trials) + " trials, failures=" + std::to_string(failures)};
}

// Criterion 5: single-shot fusion-error statistics over a ~ U(-10, 10),
// 1e4 draws per noise mode.
Outcome criterion_histogram_experiment() {
  const double sigma_f = shot_noise_sigma(reference_quantum());

  ExperimentConfig cfg = default_config();
  cfg.scenario.quantum = reference_quantum();
  cfg.n_runs = 10000;
  cfg.master_seed = 20240905;
  cfg.has_draw_range = true;
  cfg.draw_min = -10.0;
  cfg.draw_max = 10.0;

  cfg.scenario.fusion.noise_mode = NoiseMode::kAccelerationDomain;
  const AggregateStats accel = single_shot_histogram(cfg);
  const bool accel_ok = std::fabs(accel.err_std - sigma_f) <= 0.05 * sigma_f;

  cfg.scenario.fusion.noise_mode = NoiseMode::kSignalDomain;
  const AggregateStats sig = single_shot_histogram(cfg);
  const bool signal_ok = sig.err_std > sigma_f && sig.err_excess_kurtosis > 0.0;

  cfg.scenario.fusion.noise_mode = NoiseMode::kNone;
  cfg.scenario.classical.constant_bias = 0.0;
  cfg.scenario.classical.sigma_white = 0.0;
  cfg.scenario.classical.sigma_bias_offset = 0.0;
  cfg.scenario.classical.sigma_bias_drift = 0.0;
  const AggregateStats none = single_shot_histogram(cfg);
  const double none_worst = std::max(std::fabs(none.err_min), std::fabs(none.err_max));
  const bool none_ok = none_worst <= 1e-9;

  return {accel_ok && signal_ok && none_ok,
          "accel std=" + fmt(accel.err_std) + " (sigma_f=" + fmt(sigma_f) +
              "), signal std=" + fmt(sig.err_std) + " kurt=" + fmt(sig.err_excess_kurtosis) +
              ", none max|err|=" + fmt(none_worst)};
}

// Criterion 6: 100 paired 1000 s runs; fused navigation must beat
// classical-only dead reckoning in at least 95 of them, and the
// constant-bias-only closed form must hold to 0.1%.
Outcome criterion_bias_cancellation() {
  ScenarioConfig base;
  base.duration = 1000.0;
  base.quantum = reference_quantum();  // classical/fusion fields keep their defaults

  const int n_runs = 100;
  std::vector<double> fused_err(n_runs);
  std::vector<double> classical_err(n_runs);
  detail::parallel_for_index(0, n_runs, 0, [&](long run) {
    ScenarioConfig cfg = base;
    cfg.seed = derive_seed(20240906, static_cast<std::uint64_t>(run));
    cfg.mode = RunMode::kFused;
    fused_err[run] = std::fabs(run_scenario(cfg).pos_err.back());
    cfg.mode = RunMode::kClassicalOnly;
    classical_err[run] = std::fabs(run_scenario(cfg).pos_err.back());
  });
  int wins = 0;
  for (int r = 0; r < n_runs; ++r) wins += fused_err[r] < classical_err[r] ? 1 : 0;

  ScenarioConfig bias_only = base;
  bias_only.mode = RunMode::kClassicalOnly;
  bias_only.classical.sigma_white = 0.0;
  bias_only.classical.sigma_bias_offset = 0.0;
  bias_only.classical.sigma_bias_drift = 0.0;
  bias_only.classical.constant_bias = 2e-3;
  bias_only.seed = derive_seed(20240906, 0);
  const RunSeries series = run_scenario(bias_only);
  const double t_last = series.t.back();
  const double expected = 0.5 * 2e-3 * t_last * t_last;
  const double rel = std::fabs(series.pos_err.back() - expected) / expected;

  const bool pass = wins >= 95 && rel <= 1e-3;
  return {pass, "fused wins " + std::to_string(wins) + "/100 paired runs, bias-only pos err vs b*t^2/2 rel " +
                    fmt(rel)};
}

// Criterion 7: 100 runs of 30 minutes in fused-q2 mode. The RMSE of the
// fused acceleration error at each quantum epoch must stay within
// [0.5, 2] sigma_f, with no significantly positive trend (one-sided 95%
// least-squares slope test).
Outcome criterion_quadrature_no_drift() {
  ScenarioConfig base;
  base.duration = 1800.0;
  base.mode = RunMode::kFusedQ2;
  base.quantum = reference_quantum();

  const int n_runs = 100;
  const long n_epochs = static_cast<long>(base.duration * base.quantum_rate) - 1;  // t = 1..1799
  const long stride = base.quantum_stride();
  std::vector<std::vector<double>> errors(static_cast<std::size_t>(n_runs));
  detail::parallel_for_index(0, n_runs, 0, [&](long run) {
    ScenarioConfig cfg = base;
    cfg.seed = derive_seed(20240907, static_cast<std::uint64_t>(run));
    const RunSeries series = run_scenario(cfg);
    auto& err = errors[static_cast<std::size_t>(run)];
    err.resize(static_cast<std::size_t>(n_epochs));
    for (long k = 1; k <= n_epochs; ++k) {
      const auto idx = static_cast<std::size_t>(k * stride);
      err[static_cast<std::size_t>(k - 1)] = series.a_fused[idx] - series.a_true[idx];
    }
  });

  const double sigma_f = shot_noise_sigma(base.quantum);
  std::vector<double> rmse(static_cast<std::size_t>(n_epochs));
  double lo = 1e300, hi = 0.0;
  for (long k = 0; k < n_epochs; ++k) {
    double sum2 = 0.0;
    for (int r = 0; r < n_runs; ++r) {
      const double e = errors[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
      sum2 += e * e;
    }
    rmse[static_cast<std::size_t>(k)] = std::sqrt(sum2 / n_runs);
    lo = std::min(lo, rmse[static_cast<std::size_t>(k)]);
    hi = std::max(hi, rmse[static_cast<std::size_t>(k)]);
  }
  const bool band_ok = lo >= 0.5 * sigma_f && hi <= 2.0 * sigma_f;

  // Least-squares slope of RMSE against epoch time.
  const auto n = static_cast<double>(n_epochs);
  double xbar = 0.0, ybar = 0.0;
  for (long k = 0; k < n_epochs; ++k) {
    xbar += static_cast<double>(k + 1);
    ybar += rmse[static_cast<std::size_t>(k)];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0;
  for (long k = 0; k < n_epochs; ++k) {
    const double dx = static_cast<double>(k + 1) - xbar;
    sxx += dx * dx;
    sxy += dx * (rmse[static_cast<std::size_t>(k)] - ybar);
  }
  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (long k = 0; k < n_epochs; ++k) {
    const double fitted = ybar + slope * (static_cast<double>(k + 1) - xbar);
    const double resid = rmse[static_cast<std::size_t>(k)] - fitted;
    ssr += resid * resid;
  }
  const double slope_se = std::sqrt(ssr / (n - 2.0) / sxx);
  const double t_stat = slope / slope_se;
  const bool trend_ok = t_stat < 1.645;

  return {band_ok && trend_ok, "rmse/sigma_f in [" + fmt(lo / sigma_f) + ", " + fmt(hi / sigma_f) +
                                   "], slope t-stat " + fmt(t_stat)};
}

// Criterion 8: the montecarlo subcommand with the same master seed and
// different worker counts produces byte-identical output files.
Outcome criterion_cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "qfuse_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg_path = root / "exp.cfg";
  std::ofstream(cfg_path) << "[scenario]\nduration = 30\nmode = fused\n"
                             "[experiment]\nruns = 6\nmaster_seed = 31415\n";

  auto run_cli = [&](const std::string& out, int workers) {
    const std::string cmd = std::string(QFUSE_CLI_PATH) + " montecarlo --config " +
                            cfg_path.string() + " --workers " + std::to_string(workers) +
                            " --out " + out + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  if (!run_cli((root / "w1").string(), 1)) return {false, "CLI run with --workers 1 failed"};
  if (!run_cli((root / "w2").string(), 2)) return {false, "CLI run with --workers 2 failed"};

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  int compared = 0;
  for (const char* name : {"aggregate.csv", "timeseries_run0.csv", "histogram.csv", "manifest"}) {
    const std::string a = slurp(root / "w1" / name);
    const std::string b = slurp(root / "w2" / name);
    if (a.empty() || a != b) return {false, std::string("file mismatch: ") + name};
    ++compared;
  }
  fs::remove_all(root);
  return {true, std::to_string(compared) + " files byte-identical across worker counts"};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Entry> criteria = {
      {1, "shot-noise constant", criterion_shot_noise_constant},
      {2, "round-trip inversion", criterion_round_trip},
      {3, "oracle equivalence", criterion_oracle_equivalence},
      {4, "selection-robustness bound", criterion_selection_robustness},
      {5, "histogram experiment", criterion_histogram_experiment},
      {6, "bias-cancellation navigation", criterion_bias_cancellation},
      {7, "quadrature no-drift", criterion_quadrature_no_drift},
      {8, "output determinism", criterion_cli_determinism},
  };

  bool all_pass = true;
  for (const Entry& entry : criteria) {
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && outcome.pass;
    std::printf("[%s] criterion %d: %s (%s)\n", outcome.pass ? "PASS" : "FAIL", entry.id,
                entry.name, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", all_pass ? "acceptance: all criteria passed" : "acceptance: FAILURES");
  return all_pass ? 0 : 1;
}
