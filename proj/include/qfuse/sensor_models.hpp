// Forward models for the two accelerometers.
//
// Quantum (cold-atom) sensor: a constant acceleration a over the
// interrogation produces the fringe signal
//     S = N * sin(k_eff * a * T^2 + phi0),    k_eff = 4*pi / lambda,
// so the signal wraps once |k_eff * a * T^2| exceeds the principal
// branch. The shot-noise floor of the recovered acceleration is
//     sigma_f = 1 / (k_eff * T^2 * sqrt(N)).
//
// Classical sensor: output = truth + w(t) with
//     w(t) = b + white(sigma_q) + gauss_markov(sigma_bo, tau)
//              + drift(sigma_bd),
// where the bias-offset term is a first-order Gauss-Markov process with
// stationary std sigma_bo, and the bias drift is a Gaussian walk whose
// marginal variance grows as sigma_bd^2 * sqrt(t) (hence sigma_bd carries
// units of m/s^2 * s^(-1/4)).

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qfuse/random.hpp"

namespace qfuse {

enum class NoiseMode {
  kNone,                // exact signal, exact fused output
  kAccelerationDomain,  // exact signal; Gaussian(0, sigma_f^2) on the fused output
  kSignalDomain,        // Gaussian(0, N) atom-count noise on S, clamped to [-N, N]
};

struct QuantumSensorConfig {
  double n_atoms = 1000.0;          // N, atoms per shot
  double wavelength = 780e-9;       // lambda, m
  double half_interrogation = 1e-3; // T, s
  double pulse_width = 1e-6;        // tau, s; configuration record only
  double initial_phase = 0.0;       // phi0, rad
  double sample_period = 1.0;       // s between quantum shots

  void validate() const {
    if (!(n_atoms >= 1.0)) throw std::invalid_argument("quantum: n_atoms must be >= 1");
    if (!(wavelength > 0.0)) throw std::invalid_argument("quantum: wavelength must be > 0");
    if (!(half_interrogation > 0.0))
      throw std::invalid_argument("quantum: half_interrogation must be > 0");
    if (!(pulse_width >= 0.0)) throw std::invalid_argument("quantum: pulse_width must be >= 0");
    if (!std::isfinite(initial_phase))
      throw std::invalid_argument("quantum: initial_phase must be finite");
    if (!(sample_period > 0.0)) throw std::invalid_argument("quantum: sample_period must be > 0");
  }
};

// k_eff = 4*pi / lambda, rad/m.
inline double effective_wavenumber(const QuantumSensorConfig& cfg) {
  return 4.0 * M_PI / cfg.wavelength;
}

// k_eff * T^2: radians of fringe phase per m/s^2 of acceleration.
inline double scale_factor(const QuantumSensorConfig& cfg) {
  return effective_wavenumber(cfg) * cfg.half_interrogation * cfg.half_interrogation;
}

// Fringe phase accumulated between the two atom clouds.
inline double phase_shift(const QuantumSensorConfig& cfg, double accel) {
  return scale_factor(cfg) * accel;
}

// Noise-free fringe signal, in atom-count units; |S| <= N.
inline double quantum_signal(const QuantumSensorConfig& cfg, double accel) {
  return cfg.n_atoms * std::sin(phase_shift(cfg, accel) + cfg.initial_phase);
}

// Shot-noise floor of the recovered acceleration, m/s^2.
inline double shot_noise_sigma(const QuantumSensorConfig& cfg) {
  return 1.0 / (scale_factor(cfg) * std::sqrt(cfg.n_atoms));
}

// Signal sample under the chosen noise model. Acceleration-domain noise
// is applied after inversion (see apply_fusion_noise), so both kNone and
// kAccelerationDomain return the exact signal here. Signal-domain noise
// adds Gaussian(0, N) atom-count noise and clamps to the physical range
// [-N, N] so the inverse model stays defined.
inline double quantum_signal_noisy(const QuantumSensorConfig& cfg, double accel,
                                   NoiseMode mode, RandomStream& rng) {
  const double exact = quantum_signal(cfg, accel);
  if (mode != NoiseMode::kSignalDomain) return exact;
  const double noisy = exact + rng.normal(0.0, std::sqrt(cfg.n_atoms));
  if (noisy > cfg.n_atoms) return cfg.n_atoms;
  if (noisy < -cfg.n_atoms) return -cfg.n_atoms;
  return noisy;
}

struct ClassicalSensorConfig {
  double sample_rate = 200.0;      // Hz
  double constant_bias = 2e-3;     // b, m/s^2
  double sigma_white = 1e-3;       // sigma_q, m/s^2
  double sigma_bias_offset = 1e-3; // sigma_bo, m/s^2 (Gauss-Markov stationary std)
  double gm_time_constant = 3600.0;// s
  double sigma_bias_drift = 1e-4;  // sigma_bd, m/s^2 * s^(-1/4)

  void validate() const {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("classical: sample_rate must be > 0");
    if (!std::isfinite(constant_bias))
      throw std::invalid_argument("classical: constant_bias must be finite");
    if (!(sigma_white >= 0.0)) throw std::invalid_argument("classical: sigma_white must be >= 0");
    if (!(sigma_bias_offset >= 0.0))
      throw std::invalid_argument("classical: sigma_bias_offset must be >= 0");
    if (!(gm_time_constant > 0.0))
      throw std::invalid_argument("classical: gm_time_constant must be > 0");
    if (!(sigma_bias_drift >= 0.0))
      throw std::invalid_argument("classical: sigma_bias_drift must be >= 0");
  }
};

// Evolving stochastic state of one classical sensor. last_time is
// non-decreasing across updates.
struct ClassicalNoiseState {
  double gm_value = 0.0;
  double drift_value = 0.0;
  double last_time = 0.0;
};

// One classical sample at time t. Advances the Gauss-Markov state over
// dt = t - last_time and the drift walk by an increment of variance
// sigma_bd^2 * (sqrt(t) - sqrt(last_time)), which keeps the drift's
// marginal variance at sigma_bd^2 * sqrt(t).
inline double sample_classical(const ClassicalSensorConfig& cfg, ClassicalNoiseState& state,
                               double a_true, double t, RandomStream& rng) {
  if (t < state.last_time)
    throw std::invalid_argument("sample_classical: time reversal (t=" + std::to_string(t) +
                                " < last_time=" + std::to_string(state.last_time) + ")");

  const double dt = t - state.last_time;
  const double decay = std::exp(-dt / cfg.gm_time_constant);
  const double gm_sigma = cfg.sigma_bias_offset * std::sqrt(1.0 - decay * decay);
  state.gm_value = state.gm_value * decay + rng.normal(0.0, gm_sigma);

  const double drift_var_inc = std::sqrt(t) - std::sqrt(state.last_time);
  state.drift_value += rng.normal(0.0, cfg.sigma_bias_drift * std::sqrt(drift_var_inc));

  state.last_time = t;

  const double white = rng.normal(0.0, cfg.sigma_white);
  return a_true + cfg.constant_bias + white + state.gm_value + state.drift_value;
}

inline const char* to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::kNone: return "none";
    case NoiseMode::kAccelerationDomain: return "acceleration";
    case NoiseMode::kSignalDomain: return "signal";
  }
  return "?";
}

}  // namespace qfuse
