// 1-D strapdown dead-reckoning simulation with dual-rate sampling.
//
// The classical sensor is sampled every tick; the quantum sensor fires at
// an integer tick multiple. At every quantum epoch the fused acceleration
// resets the classical output through an additive correction, which then
// holds until the next epoch. Truth and estimate use the identical
// integrator, exact under zero-order-hold acceleration.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qfuse/fusion.hpp"
#include "qfuse/quadrature.hpp"
#include "qfuse/random.hpp"
#include "qfuse/sensor_models.hpp"

namespace qfuse {

enum class RunMode { kClassicalOnly, kFused, kFusedQ2 };

inline const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kClassicalOnly: return "classical";
    case RunMode::kFused: return "fused";
    case RunMode::kFusedQ2: return "fused-q2";
  }
  return "?";
}

struct ScenarioConfig {
  double duration = 1000.0;      // s
  double classical_rate = 200.0; // Hz; must be an integer multiple of quantum_rate
  double quantum_rate = 1.0;     // Hz
  double sigma_truth = 1.0;      // sigma_a of the body acceleration, m/s^2
  double truth_lowpass_tau = 0.0;// s; 0 disables smoothing of the truth profile
  RunMode mode = RunMode::kFused;
  QuantumSensorConfig quantum;
  ClassicalSensorConfig classical;
  FusionConfig fusion;
  std::uint64_t seed = 1;

  long ticks() const { return std::lround(duration * classical_rate); }

  long quantum_stride() const { return std::lround(classical_rate / quantum_rate); }

  void validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("scenario: duration must be > 0");
    if (!(classical_rate > 0.0))
      throw std::invalid_argument("scenario: classical_rate must be > 0");
    if (!(quantum_rate > 0.0)) throw std::invalid_argument("scenario: quantum_rate must be > 0");
    const double ratio = classical_rate / quantum_rate;
    const double nearest = std::round(ratio);
    if (!(nearest >= 1.0) || std::fabs(ratio - nearest) > 1e-9 * nearest)
      throw std::invalid_argument(
          "scenario: classical_rate must be an integer multiple of quantum_rate");
    if (!(sigma_truth >= 0.0)) throw std::invalid_argument("scenario: sigma_truth must be >= 0");
    if (!(truth_lowpass_tau >= 0.0))
      throw std::invalid_argument("scenario: truth_lowpass_tau must be >= 0");
    if (ticks() < 1) throw std::invalid_argument("scenario: duration too short for one tick");
    quantum.validate();
    classical.validate();
    fusion.validate();
  }
};

struct NavState {
  double t = 0.0;
  double position = 0.0;
  double velocity = 0.0;
};

// Exact propagation over one zero-order-hold interval.
inline NavState integrate_step(NavState state, double accel, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be > 0");
  NavState next;
  next.position = state.position + state.velocity * dt + 0.5 * accel * dt * dt;
  next.velocity = state.velocity + accel * dt;
  next.t = state.t + dt;
  return next;
}

// i.i.d. Gaussian(0, sigma^2) draw per tick, held constant over the tick.
inline std::vector<double> generate_truth(double sigma, double duration, double rate,
                                          RandomStream& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("generate_truth: rate must be > 0");
  const long n = std::lround(duration * rate);
  std::vector<double> profile(static_cast<std::size_t>(n));
  for (auto& a : profile) a = rng.normal(0.0, sigma);
  return profile;
}

// Per-classical-tick record of one run. Row i holds the states at
// t = i*dt and the accelerations applied over [t, t+dt).
struct RunSeries {
  std::vector<double> t;
  std::vector<double> a_true;
  std::vector<double> a_meas;   // corrected classical measurement
  std::vector<double> a_fused;  // latest fused output; NaN before the first epoch
  std::vector<double> accel_err;
  std::vector<double> pos_true;
  std::vector<double> pos_est;
  std::vector<double> pos_err;
  std::vector<double> vel_err;
  std::vector<std::uint8_t> quantum_tick;
  std::vector<std::uint8_t> converged;
  long convergence_failures = 0;
  long quantum_updates = 0;

  std::size_t size() const { return t.size(); }
};

namespace detail {

inline void lowpass_in_place(std::vector<double>& x, double tau, double dt) {
  if (tau <= 0.0) return;
  const double alpha = dt / (tau + dt);
  double y = 0.0;
  for (auto& v : x) {
    y += alpha * (v - y);
    v = y;
  }
}

}  // namespace detail

inline RunSeries run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const long n = cfg.ticks();
  const long stride = cfg.quantum_stride();
  const double dt = 1.0 / cfg.classical_rate;
  const bool fused = cfg.mode != RunMode::kClassicalOnly;

  RandomStream truth_rng(cfg.seed, kStreamTruth);
  RandomStream classical_rng(cfg.seed, kStreamClassical);
  RandomStream quantum_rng(cfg.seed, kStreamQuantum);

  std::vector<double> truth =
      generate_truth(cfg.sigma_truth, cfg.duration, cfg.classical_rate, truth_rng);
  detail::lowpass_in_place(truth, cfg.truth_lowpass_tau, dt);

  const QuadraturePair pair = QuadraturePair::from_base(cfg.quantum);
  const double epsilon = cfg.fusion.resolved_epsilon(cfg.quantum);
  const NoiseMode noise_mode = cfg.fusion.noise_mode;

  RunSeries series;
  const auto count = static_cast<std::size_t>(n);
  series.t.resize(count);
  series.a_true.resize(count);
  series.a_meas.resize(count);
  series.a_fused.resize(count);
  series.accel_err.resize(count);
  series.pos_true.resize(count);
  series.pos_est.resize(count);
  series.pos_err.resize(count);
  series.vel_err.resize(count);
  series.quantum_tick.assign(count, 0);
  series.converged.assign(count, 0);

  ClassicalNoiseState noise_state;
  CalibrationState calibration;
  NavState truth_state;
  NavState est_state;
  double last_fused = std::numeric_limits<double>::quiet_NaN();

  for (long i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double a_true = truth[static_cast<std::size_t>(i)];
    const double a_raw = sample_classical(cfg.classical, noise_state, a_true, t, classical_rng);

    bool tick_converged = false;
    bool is_quantum_tick = fused && i > 0 && i % stride == 0;
    if (is_quantum_tick) {
      const double a_c = a_raw + calibration.correction;
      UnwrapResult res;
      if (cfg.mode == RunMode::kFused) {
        const double s = quantum_signal_noisy(cfg.quantum, a_true, noise_mode, quantum_rng);
        res = unwrap(cfg.quantum, cfg.fusion, s, a_c);
        res = apply_fusion_noise(cfg.quantum, res, noise_mode, quantum_rng);
      } else {
        const double s1 = quantum_signal_noisy(pair.sensor_a, a_true, noise_mode, quantum_rng);
        const double s2 = quantum_signal_noisy(pair.sensor_b, a_true, noise_mode, quantum_rng);
        res = unwrap_quadrature(pair, cfg.fusion, s1, s2, a_c);
        const auto& selected = res.sensor == 1 ? pair.sensor_a : pair.sensor_b;
        res = apply_fusion_noise(selected, res, noise_mode, quantum_rng);
      }
      res.converged = convergence_check(res.a_out, res.a_f, epsilon);
      series.quantum_updates += 1;
      if (res.converged) {
        calibration = recalibrate(calibration, a_raw, res.a_out, t);
        tick_converged = true;
      } else {
        series.convergence_failures += 1;
      }
      last_fused = res.a_out;
    }

    const double a_meas = a_raw + calibration.correction;
    const auto idx = static_cast<std::size_t>(i);
    series.t[idx] = t;
    series.a_true[idx] = a_true;
    series.a_meas[idx] = a_meas;
    series.a_fused[idx] = last_fused;
    series.accel_err[idx] = a_meas - a_true;
    series.pos_true[idx] = truth_state.position;
    series.pos_est[idx] = est_state.position;
    series.pos_err[idx] = est_state.position - truth_state.position;
    series.vel_err[idx] = est_state.velocity - truth_state.velocity;
    series.quantum_tick[idx] = is_quantum_tick ? 1 : 0;
    series.converged[idx] = tick_converged ? 1 : 0;

    truth_state = integrate_step(truth_state, a_true, dt);
    est_state = integrate_step(est_state, a_meas, dt);
  }
  return series;
}

}  // namespace qfuse
