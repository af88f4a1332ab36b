// Monte-Carlo experiment driver and statistics aggregation.
//
// Runs are independent scenarios whose seeds derive from (master seed,
// run index). Aggregation folds per-run summaries in run-index order in
// fixed-size batches, so the result bytes do not depend on how many
// worker threads executed the batch.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qfuse/navsim.hpp"
#include "qfuse/random.hpp"

namespace qfuse {

struct ExperimentConfig {
  ScenarioConfig scenario;
  long n_runs = 1;
  std::uint64_t master_seed = 1;
  std::string output_directory = "out";
  int histogram_bins = 101;
  bool has_draw_range = false;  // single-shot experiments draw a ~ U(draw_min, draw_max)
  double draw_min = 0.0;
  double draw_max = 0.0;
  long aggregate_stride = 0;  // 0 = auto: 1 for runs <= 1000 s, else one bin per quantum period
  int save_series = 1;        // dump the first k run series
  int workers = 0;            // 0 = hardware concurrency; never affects results

  long resolved_stride() const {
    if (aggregate_stride > 0) return aggregate_stride;
    return scenario.duration <= 1000.0 ? 1 : scenario.quantum_stride();
  }

  void validate() const {
    scenario.validate();
    if (n_runs < 1) throw std::invalid_argument("experiment: runs must be >= 1");
    if (histogram_bins < 2) throw std::invalid_argument("experiment: histogram_bins must be >= 2");
    if (has_draw_range && !(draw_min < draw_max))
      throw std::invalid_argument("experiment: draw_min must be < draw_max");
    if (aggregate_stride < 0)
      throw std::invalid_argument("experiment: aggregate_stride must be >= 0");
    if (save_series < 0) throw std::invalid_argument("experiment: save_series must be >= 0");
    if (workers < 0) throw std::invalid_argument("experiment: workers must be >= 0");
  }
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  long count = 0;
};

struct AggregateRow {
  double t = 0.0;
  double mean_accel = 0.0;
  double rmse_accel = 0.0;
  double std_accel = 0.0;
  double mean_pos = 0.0;
  double rmse_pos = 0.0;
  double std_pos = 0.0;
};

struct AggregateStats {
  std::vector<AggregateRow> rows;        // time-binned, Monte-Carlo mode
  std::vector<HistogramBin> histogram;   // single-shot mode
  long n_runs = 0;
  long convergence_failures = 0;
  long quantum_updates = 0;
  // Moments of the single-shot error sample.
  long draws = 0;
  double err_mean = 0.0;
  double err_std = 0.0;
  double err_excess_kurtosis = 0.0;
  double err_min = 0.0;
  double err_max = 0.0;
  std::vector<RunSeries> saved_series;

  double convergence_failure_rate() const {
    return quantum_updates > 0
               ? static_cast<double>(convergence_failures) / static_cast<double>(quantum_updates)
               : 0.0;
  }
};

namespace detail {

struct RunSummary {
  std::vector<double> accel_err;  // decimated at the aggregate stride
  std::vector<double> pos_err;
  long convergence_failures = 0;
  long quantum_updates = 0;
  RunSeries series;  // populated only for saved runs
  bool has_series = false;
};

inline RunSummary summarize_run(const ExperimentConfig& cfg, long run_index, bool keep_series) {
  ScenarioConfig scenario = cfg.scenario;
  scenario.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(run_index));
  RunSeries series = run_scenario(scenario);

  const long stride = cfg.resolved_stride();
  RunSummary summary;
  summary.convergence_failures = series.convergence_failures;
  summary.quantum_updates = series.quantum_updates;
  const long n = static_cast<long>(series.size());
  summary.accel_err.reserve(static_cast<std::size_t>(n / stride + 1));
  summary.pos_err.reserve(static_cast<std::size_t>(n / stride + 1));
  for (long i = 0; i < n; i += stride) {
    summary.accel_err.push_back(series.accel_err[static_cast<std::size_t>(i)]);
    summary.pos_err.push_back(series.pos_err[static_cast<std::size_t>(i)]);
  }
  if (keep_series) {
    summary.series = std::move(series);
    summary.has_series = true;
  }
  return summary;
}

// Runs fn(i) for i in [begin, end) on up to `workers` threads. A throw
// from any index aborts the loop; the failure with the smallest index is
// rethrown with that index as context.
template <typename Fn>
inline void parallel_for_index(long begin, long end, int workers, Fn&& fn) {
  const long span = end - begin;
  if (span <= 0) return;
  long hw = static_cast<long>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  const long n_threads = std::min(span, workers > 0 ? static_cast<long>(workers) : hw);

  std::mutex error_mutex;
  long error_index = -1;
  std::string error_what;
  auto record_error = [&](long i, const char* what) {
    const std::lock_guard<std::mutex> lock(error_mutex);
    if (error_index < 0 || i < error_index) {
      error_index = i;
      error_what = what;
    }
  };

  if (n_threads <= 1) {
    for (long i = begin; i < end && error_index < 0; ++i) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        record_error(i, e.what());
      }
    }
  } else {
    std::atomic<long> next{begin};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (long k = 0; k < n_threads; ++k) {
      pool.emplace_back([&]() {
        for (long i = next.fetch_add(1); i < end && !failed.load(); i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (const std::exception& e) {
            record_error(i, e.what());
            failed.store(true);
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  if (error_index >= 0)
    throw std::runtime_error("run " + std::to_string(error_index) + ": " + error_what);
}

}  // namespace detail

// Executes n_runs independent scenarios and aggregates the error series
// by time bin. With stride s, bin j holds the per-run samples at tick
// j*s; rows carry the mean over runs, the RMSE over runs, and the std
// over runs (rmse^2 = mean^2 + std^2).
inline AggregateStats run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  const long stride = cfg.resolved_stride();
  const long n_ticks = cfg.scenario.ticks();
  const long n_bins = (n_ticks - 1) / stride + 1;
  const double dt = 1.0 / cfg.scenario.classical_rate;

  std::vector<double> sum_a(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> sum_a2(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> sum_p(static_cast<std::size_t>(n_bins), 0.0);
  std::vector<double> sum_p2(static_cast<std::size_t>(n_bins), 0.0);

  AggregateStats stats;
  stats.n_runs = cfg.n_runs;

  // Fixed batch size keeps the fold order canonical for any worker count.
  constexpr long kBatch = 16;
  std::vector<detail::RunSummary> batch(kBatch);
  for (long batch_start = 0; batch_start < cfg.n_runs; batch_start += kBatch) {
    const long batch_end = std::min(batch_start + kBatch, cfg.n_runs);
    detail::parallel_for_index(batch_start, batch_end, cfg.workers, [&](long run) {
      batch[run - batch_start] =
          detail::summarize_run(cfg, run, run < static_cast<long>(cfg.save_series));
    });
    for (long run = batch_start; run < batch_end; ++run) {
      detail::RunSummary& summary = batch[run - batch_start];
      if (static_cast<long>(summary.accel_err.size()) != n_bins)
        throw std::logic_error("run_monte_carlo: bin count mismatch");
      for (long j = 0; j < n_bins; ++j) {
        const auto idx = static_cast<std::size_t>(j);
        sum_a[idx] += summary.accel_err[idx];
        sum_a2[idx] += summary.accel_err[idx] * summary.accel_err[idx];
        sum_p[idx] += summary.pos_err[idx];
        sum_p2[idx] += summary.pos_err[idx] * summary.pos_err[idx];
      }
      stats.convergence_failures += summary.convergence_failures;
      stats.quantum_updates += summary.quantum_updates;
      if (summary.has_series) stats.saved_series.push_back(std::move(summary.series));
      summary = detail::RunSummary{};
    }
  }

  const double inv_runs = 1.0 / static_cast<double>(cfg.n_runs);
  stats.rows.resize(static_cast<std::size_t>(n_bins));
  for (long j = 0; j < n_bins; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    AggregateRow& row = stats.rows[idx];
    row.t = static_cast<double>(j * stride) * dt;
    row.mean_accel = sum_a[idx] * inv_runs;
    row.rmse_accel = std::sqrt(sum_a2[idx] * inv_runs);
    row.std_accel = std::sqrt(std::max(0.0, sum_a2[idx] * inv_runs - row.mean_accel * row.mean_accel));
    row.mean_pos = sum_p[idx] * inv_runs;
    row.rmse_pos = std::sqrt(sum_p2[idx] * inv_runs);
    row.std_pos = std::sqrt(std::max(0.0, sum_p2[idx] * inv_runs - row.mean_pos * row.mean_pos));
  }
  return stats;
}

namespace detail {

inline void fill_sample_stats(const std::vector<double>& errors, int n_bins,
                              AggregateStats& stats) {
  const auto n = static_cast<double>(errors.size());
  stats.draws = static_cast<long>(errors.size());
  if (errors.empty()) return;

  double sum = 0.0;
  double lo = errors.front();
  double hi = errors.front();
  for (double e : errors) {
    sum += e;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const double mean = sum / n;
  double m2 = 0.0, m4 = 0.0;
  for (double e : errors) {
    const double d = e - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m4 /= n;
  stats.err_mean = mean;
  stats.err_std = std::sqrt(m2);
  stats.err_excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
  stats.err_min = lo;
  stats.err_max = hi;

  // Contiguous bins over [lo, hi); the last bin is closed so hi lands in
  // it. A degenerate sample collapses to a single bin.
  if (lo == hi) {
    stats.histogram.push_back({lo, hi, static_cast<long>(errors.size())});
    return;
  }
  stats.histogram.assign(static_cast<std::size_t>(n_bins), HistogramBin{});
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (int b = 0; b < n_bins; ++b) {
    stats.histogram[static_cast<std::size_t>(b)].lo = lo + width * b;
    stats.histogram[static_cast<std::size_t>(b)].hi = lo + width * (b + 1);
  }
  stats.histogram.back().hi = hi;
  for (double e : errors) {
    auto b = static_cast<long>((e - lo) / width);
    b = std::clamp(b, 0L, static_cast<long>(n_bins) - 1);
    stats.histogram[static_cast<std::size_t>(b)].count += 1;
  }
}

}  // namespace detail

// Single-shot experiment: per run, draw a true acceleration uniformly
// from the configured range, apply one classical error draw at t = 0,
// invert the (optionally noisy) quantum signal against it, and record
// the fused-output error a_out - a_true.
inline AggregateStats single_shot_histogram(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.has_draw_range)
    throw std::invalid_argument("single_shot_histogram: acceleration draw range not set");

  const NoiseMode mode = cfg.scenario.fusion.noise_mode;
  const QuantumSensorConfig& qcfg = cfg.scenario.quantum;
  std::vector<double> errors(static_cast<std::size_t>(cfg.n_runs));

  detail::parallel_for_index(0, cfg.n_runs, cfg.workers, [&](long run) {
    RandomStream rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(run)),
                     kStreamSingleShot);
    const double a_true = rng.uniform(cfg.draw_min, cfg.draw_max);
    ClassicalNoiseState state;
    const double classical_error =
        sample_classical(cfg.scenario.classical, state, 0.0, 0.0, rng);
    const double a_c = a_true + classical_error;
    const double s = quantum_signal_noisy(qcfg, a_true, mode, rng);
    UnwrapResult res = unwrap(qcfg, cfg.scenario.fusion, s, a_c);
    res = apply_fusion_noise(qcfg, res, mode, rng);
    errors[static_cast<std::size_t>(run)] = res.a_out - a_true;
  });

  AggregateStats stats;
  stats.n_runs = cfg.n_runs;
  stats.quantum_updates = cfg.n_runs;
  detail::fill_sample_stats(errors, cfg.histogram_bins, stats);
  return stats;
}

}  // namespace qfuse
