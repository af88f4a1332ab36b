// Shared fixtures for the test suites: the reference sensor
// configuration used throughout, small statistics helpers, and an
// independent enumeration of the inverse-model candidate grid (used as
// an oracle against the windowed search).

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qfuse/fusion.hpp"
#include "qfuse/sensor_models.hpp"

namespace testutil {

// N = 1000, lambda = 780 nm, T = 1 ms, tau = 1 us, phi0 = 0. With these
// values the fringe period is lambda/(2 T^2) = 0.39 m/s^2 exactly and the
// first fringe peak sits at lambda/(8 T^2) = 0.0975 m/s^2.
inline qfuse::QuantumSensorConfig reference_quantum() {
  qfuse::QuantumSensorConfig cfg;
  cfg.n_atoms = 1000.0;
  cfg.wavelength = 780e-9;
  cfg.half_interrogation = 1e-3;
  cfg.pulse_width = 1e-6;
  cfg.initial_phase = 0.0;
  cfg.sample_period = 1.0;
  return cfg;
}

inline double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

// Every candidate acceleration for signal S within [center - span,
// center + span], deduplicated, ascending. Enumerates both branches
// directly from the inverse model, independent of unwrap's windowing.
inline std::vector<double> candidate_grid(const qfuse::QuantumSensorConfig& cfg, double signal,
                                          double center, double span) {
  std::vector<double> grid;
  const double scale = qfuse::scale_factor(cfg);
  const double period = 2.0 * M_PI / scale;
  const auto lo_n = static_cast<long>(std::floor((center - span) / period)) - 2;
  const auto hi_n = static_cast<long>(std::ceil((center + span) / period)) + 2;
  for (long n = lo_n; n <= hi_n; ++n) {
    for (int s : {+1, -1}) {
      const double a = qfuse::candidate_acceleration(cfg, signal, {s, n});
      if (a >= center - span && a <= center + span) grid.push_back(a);
    }
  }
  std::sort(grid.begin(), grid.end());
  const double tol = 1e-9 * period;
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [tol](double a, double b) { return std::fabs(a - b) < tol; }),
             grid.end());
  return grid;
}

// Minimum gap between distinct candidates of the grid around `center`.
inline double min_candidate_gap(const qfuse::QuantumSensorConfig& cfg, double signal,
                                double center) {
  const double period = 2.0 * M_PI / qfuse::scale_factor(cfg);
  const std::vector<double> grid = candidate_grid(cfg, signal, center, 3.0 * period);
  double gap = period;
  for (std::size_t i = 1; i < grid.size(); ++i) gap = std::min(gap, grid[i] - grid[i - 1]);
  return gap;
}

}  // namespace testutil
