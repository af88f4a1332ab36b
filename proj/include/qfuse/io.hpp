// CSV and manifest emission. All numbers use shortest round-trip
// formatting with '.' as the decimal separator; rows are
// newline-terminated. Output bytes depend only on the experiment
// configuration and master seed.

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>

#include "qfuse/config.hpp"
#include "qfuse/harness.hpp"
#include "qfuse/navsim.hpp"

namespace qfuse {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

}  // namespace detail

inline void write_timeseries_csv(const std::filesystem::path& path, const RunSeries& series) {
  auto out = detail::open_for_write(path);
  out << "t,a_true,a_meas_corrected,a_fused,accel_err,pos_true,pos_est,pos_err,vel_err,"
         "quantum_tick_flag,converged_flag\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_double(series.t[i]) << ',' << format_double(series.a_true[i]) << ','
        << format_double(series.a_meas[i]) << ',' << format_double(series.a_fused[i]) << ','
        << format_double(series.accel_err[i]) << ',' << format_double(series.pos_true[i]) << ','
        << format_double(series.pos_est[i]) << ',' << format_double(series.pos_err[i]) << ','
        << format_double(series.vel_err[i]) << ',' << int(series.quantum_tick[i]) << ','
        << int(series.converged[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_aggregate_csv(const std::filesystem::path& path, const AggregateStats& stats) {
  auto out = detail::open_for_write(path);
  out << "t,mean_accel_err,rmse_accel,std_accel,mean_pos_err,rmse_pos,std_pos\n";
  for (const AggregateRow& row : stats.rows) {
    out << format_double(row.t) << ',' << format_double(row.mean_accel) << ','
        << format_double(row.rmse_accel) << ',' << format_double(row.std_accel) << ','
        << format_double(row.mean_pos) << ',' << format_double(row.rmse_pos) << ','
        << format_double(row.std_pos) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_histogram_csv(const std::filesystem::path& path, const AggregateStats& stats) {
  auto out = detail::open_for_write(path);
  out << "bin_low,bin_high,count\n";
  for (const HistogramBin& bin : stats.histogram) {
    out << format_double(bin.lo) << ',' << format_double(bin.hi) << ',' << bin.count << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg) {
  auto out = detail::open_for_write(path);
  out << serialize_config(cfg);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Emits everything an experiment produced into `directory`:
// timeseries_run<k>.csv for each saved run, aggregate.csv,
// histogram.csv, and the re-parseable manifest.
inline void write_outputs(const AggregateStats& stats, const ExperimentConfig& cfg,
                          const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (std::size_t k = 0; k < stats.saved_series.size(); ++k) {
    write_timeseries_csv(directory / ("timeseries_run" + std::to_string(k) + ".csv"),
                         stats.saved_series[k]);
  }
  write_aggregate_csv(directory / "aggregate.csv", stats);
  write_histogram_csv(directory / "histogram.csv", stats);
  write_manifest(directory / "manifest", cfg);
}

}  // namespace qfuse
