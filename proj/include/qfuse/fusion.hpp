// Phase unwrapping of the quantum fringe signal against a classical
// acceleration reading, plus the recalibration bookkeeping.
//
// Inverting S = N*sin(k_eff*a*T^2 + phi0) gives two candidate families,
// indexed by a sign s and an integer winding n (p = arcsin(S/N)):
//
//     s = +1:  a = (p + 2*n*pi - phi0) / (k_eff*T^2)     (ascending fringe)
//     s = -1:  a = ((2n+1)*pi - p - phi0) / (k_eff*T^2)  (descending fringe)
//
// The classical reading a_c picks the branch: windows of windings around
// the rough estimates of n are evaluated and the candidate closest to a_c
// wins. Because the fused-output noise is Gaussian with a fixed sigma_f,
// this nearest-candidate rule is exactly the maximum-likelihood choice of
// (s, n). brute_force_unwrap enumerates every candidate in a bounded
// range instead of windowing and exists as an independent cross-check.

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "qfuse/sensor_models.hpp"

namespace qfuse {

// One solution branch of the inverse model: sign in {+1, -1}, winding n.
struct BranchParams {
  int sign = +1;
  long winding = 0;
};

struct FusionConfig {
  int window_halfwidth = 2;          // W: windings searched are [n_hat - W, n_hat + W]
  double convergence_epsilon = 0.0;  // <= 0 requests the default 4*sigma_f
  NoiseMode noise_mode = NoiseMode::kAccelerationDomain;

  void validate() const {
    if (window_halfwidth < 1) throw std::invalid_argument("fusion: window_halfwidth must be >= 1");
  }

  double resolved_epsilon(const QuantumSensorConfig& qcfg) const {
    return convergence_epsilon > 0.0 ? convergence_epsilon : 4.0 * shot_noise_sigma(qcfg);
  }
};

struct UnwrapResult {
  double a_f = 0.0;       // unwrapped acceleration (pre-noise)
  BranchParams branch{};
  double residual = 0.0;  // |a_f - a_c|
  bool converged = true;
  double a_out = 0.0;     // fused measurement after output noise
  int sensor = 1;         // which sensor of a quadrature pair produced a_f
};

// Additive correction applied to raw classical samples between quantum
// updates.
struct CalibrationState {
  double correction = 0.0;
  double last_update = 0.0;
};

namespace detail {

inline double checked_arcsin_ratio(const QuantumSensorConfig& qcfg, double signal) {
  if (!(std::fabs(signal) <= qcfg.n_atoms))
    throw std::invalid_argument("unwrap: |S| > N, arcsin undefined (S=" +
                                std::to_string(signal) + ", N=" + std::to_string(qcfg.n_atoms) +
                                ")");
  return std::asin(signal / qcfg.n_atoms);
}

// Strict preference order over candidates: nearest to a_c, then smaller
// |a|, then s = +1, then smaller a. The trailing keys only decide exact
// floating-point ties and make the argmin independent of enumeration
// order.
inline bool candidate_better(double a_cand, const BranchParams& b_cand, double dist_cand,
                             double a_best, const BranchParams& b_best, double dist_best) {
  if (dist_cand != dist_best) return dist_cand < dist_best;
  const double abs_cand = std::fabs(a_cand);
  const double abs_best = std::fabs(a_best);
  if (abs_cand != abs_best) return abs_cand < abs_best;
  if (b_cand.sign != b_best.sign) return b_cand.sign > b_best.sign;
  return a_cand < a_best;
}

}  // namespace detail

// Acceleration of the (s, n) branch for signal S. Throws if |S| > N.
inline double candidate_acceleration(const QuantumSensorConfig& qcfg, double signal,
                                     BranchParams branch) {
  if (branch.sign != 1 && branch.sign != -1)
    throw std::invalid_argument("candidate_acceleration: sign must be +1 or -1");
  const double p = detail::checked_arcsin_ratio(qcfg, signal);
  const double scale = scale_factor(qcfg);
  const double n = static_cast<double>(branch.winding);
  if (branch.sign == 1) return (p + 2.0 * n * M_PI - qcfg.initial_phase) / scale;
  return ((2.0 * n + 1.0) * M_PI - p - qcfg.initial_phase) / scale;
}

// Rough winding estimates for the two branches, obtained by solving each
// branch equation for n at a = a_c and rounding half away from zero.
inline std::pair<long, long> rough_winding_estimates(const QuantumSensorConfig& qcfg,
                                                     double signal, double a_c) {
  const double p = detail::checked_arcsin_ratio(qcfg, signal);
  const double phase_c = scale_factor(qcfg) * a_c / (2.0 * M_PI);
  const double n1 = phase_c - (p - qcfg.initial_phase) / (2.0 * M_PI);
  const double n2 = phase_c + (p + qcfg.initial_phase) / (2.0 * M_PI) - 0.5;
  // Windings must stay representable; 1e15 periods is far beyond any
  // physical acceleration.
  if (!(std::fabs(n1) < 1e15) || !(std::fabs(n2) < 1e15))
    throw std::invalid_argument("rough_winding_estimates: a_c out of range");
  return {static_cast<long>(std::round(n1)), static_cast<long>(std::round(n2))};
}

// Maximum-likelihood branch selection over the windowed candidate set.
// Returns the pre-noise result: a_out == a_f until apply_fusion_noise.
inline UnwrapResult unwrap(const QuantumSensorConfig& qcfg, const FusionConfig& fcfg,
                           double signal, double a_c) {
  if (!std::isfinite(a_c)) throw std::invalid_argument("unwrap: a_c must be finite");
  const auto [n1, n2] = rough_winding_estimates(qcfg, signal, a_c);
  const int w = fcfg.window_halfwidth;

  bool have_best = false;
  double best_a = 0.0;
  double best_dist = 0.0;
  BranchParams best_branch{};
  auto consider = [&](BranchParams branch) {
    const double a = candidate_acceleration(qcfg, signal, branch);
    const double dist = std::fabs(a - a_c);
    if (!have_best || detail::candidate_better(a, branch, dist, best_a, best_branch, best_dist)) {
      have_best = true;
      best_a = a;
      best_dist = dist;
      best_branch = branch;
    }
  };
  for (long n = n1 - w; n <= n1 + w; ++n) consider({+1, n});
  for (long n = n2 - w; n <= n2 + w; ++n) consider({-1, n});
  if (!have_best) throw std::logic_error("unwrap: empty candidate set");

  UnwrapResult result;
  result.a_f = best_a;
  result.branch = best_branch;
  result.residual = best_dist;
  result.a_out = best_a;
  result.converged = true;
  return result;
}

// Exhaustive reference: evaluates every (s, n) whose candidate lies in
// [-a_range, a_range] and returns the global argmin of |a - a_c| under
// the same preference order as unwrap. No rough-estimate shortcut.
inline UnwrapResult brute_force_unwrap(const QuantumSensorConfig& qcfg, double signal,
                                       double a_c, double a_range) {
  if (!(a_range > 0.0)) throw std::invalid_argument("brute_force_unwrap: a_range must be > 0");
  if (!std::isfinite(a_c)) throw std::invalid_argument("brute_force_unwrap: a_c must be finite");
  const double p = detail::checked_arcsin_ratio(qcfg, signal);
  const double scale = scale_factor(qcfg);
  const double phase_range = a_range * scale;
  const double phi0 = qcfg.initial_phase;

  bool have_best = false;
  double best_a = 0.0;
  double best_dist = 0.0;
  BranchParams best_branch{};
  auto consider = [&](BranchParams branch) {
    const double a = candidate_acceleration(qcfg, signal, branch);
    if (std::fabs(a) > a_range) return;
    const double dist = std::fabs(a - a_c);
    if (!have_best || detail::candidate_better(a, branch, dist, best_a, best_branch, best_dist)) {
      have_best = true;
      best_a = a;
      best_dist = dist;
      best_branch = branch;
    }
  };

  // s = +1: p + 2n*pi - phi0 in [-phase_range, phase_range]
  {
    const long lo = static_cast<long>(std::floor((-phase_range - p + phi0) / (2.0 * M_PI)));
    const long hi = static_cast<long>(std::ceil((phase_range - p + phi0) / (2.0 * M_PI)));
    for (long n = lo; n <= hi; ++n) consider({+1, n});
  }
  // s = -1: (2n+1)*pi - p - phi0 in [-phase_range, phase_range]
  {
    const long lo =
        static_cast<long>(std::floor(((-phase_range + p + phi0) / M_PI - 1.0) / 2.0));
    const long hi = static_cast<long>(std::ceil(((phase_range + p + phi0) / M_PI - 1.0) / 2.0));
    for (long n = lo; n <= hi; ++n) consider({-1, n});
  }
  if (!have_best)
    throw std::invalid_argument("brute_force_unwrap: no candidate within a_range");

  UnwrapResult result;
  result.a_f = best_a;
  result.branch = best_branch;
  result.residual = best_dist;
  result.a_out = best_a;
  result.converged = true;
  return result;
}

// Output noise of the fused measurement. Acceleration-domain mode adds
// the shot-noise-equivalent Gaussian(0, sigma_f^2); signal-domain noise
// already entered through S, so a_out stays at a_f there.
inline UnwrapResult apply_fusion_noise(const QuantumSensorConfig& qcfg, UnwrapResult result,
                                       NoiseMode mode, RandomStream& rng) {
  if (mode == NoiseMode::kAccelerationDomain)
    result.a_out = result.a_f + rng.normal(0.0, shot_noise_sigma(qcfg));
  else
    result.a_out = result.a_f;
  return result;
}

inline bool convergence_check(double a_out, double a_f, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("convergence_check: epsilon must be > 0");
  return std::fabs(a_out - a_f) <= epsilon;
}

// Reset of the classical reading: after this update, corrected samples
// are raw + correction, which maps a_c_raw at time t onto a_out.
inline CalibrationState recalibrate(const CalibrationState& state, double a_c_raw, double a_out,
                                    double t) {
  if (t < state.last_update)
    throw std::invalid_argument("recalibrate: time reversal (t=" + std::to_string(t) +
                                " < last_update=" + std::to_string(state.last_update) + ")");
  CalibrationState next;
  next.correction = a_out - a_c_raw;
  next.last_update = t;
  return next;
}

}  // namespace qfuse
