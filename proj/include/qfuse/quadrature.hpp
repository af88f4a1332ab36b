// Two quantum sensors in exact phase quadrature (phi1 = 0, phi2 = pi/2).
//
// sin^2 + cos^2 = 1 guarantees that at least one of the two signals
// satisfies |S| <= N*sqrt(2)/2 for every acceleration, i.e. one sensor is
// always on a fringe section with at least 1/sqrt(2) of the maximum
// slope. Unwrapping only ever reads that sensor, which removes the
// sensitivity blow-up near fringe peaks.

#pragma once

#include <cmath>
#include <stdexcept>

#include "qfuse/fusion.hpp"

namespace qfuse {

struct QuadraturePair {
  QuantumSensorConfig sensor_a;  // initial_phase 0
  QuantumSensorConfig sensor_b;  // initial_phase pi/2

  // Both sensors share every parameter of `base` except the phases.
  static QuadraturePair from_base(QuantumSensorConfig base) {
    QuadraturePair pair;
    base.initial_phase = 0.0;
    pair.sensor_a = base;
    base.initial_phase = M_PI / 2.0;
    pair.sensor_b = base;
    return pair;
  }

  void validate() const {
    sensor_a.validate();
    sensor_b.validate();
    if (sensor_a.initial_phase != 0.0)
      throw std::invalid_argument("quadrature: sensor_a must have initial_phase 0");
    if (sensor_b.initial_phase != M_PI / 2.0)
      throw std::invalid_argument("quadrature: sensor_b must have initial_phase pi/2");
    if (sensor_a.n_atoms != sensor_b.n_atoms || sensor_a.wavelength != sensor_b.wavelength ||
        sensor_a.half_interrogation != sensor_b.half_interrogation ||
        sensor_a.pulse_width != sensor_b.pulse_width ||
        sensor_a.sample_period != sensor_b.sample_period)
      throw std::invalid_argument("quadrature: sensors may differ only in initial_phase");
  }
};

// Index (1 or 2) of the sensor operating in its linear-sensitivity
// region, |S| <= N*sqrt(2)/2. Sensor 1 wins the boundary tie; if neither
// qualifies (possible only for noisy signals), the smaller |S| wins.
inline int select_sensor(double signal_1, double signal_2, double n_atoms) {
  const double threshold = n_atoms * M_SQRT1_2;
  if (std::fabs(signal_1) <= threshold) return 1;
  if (std::fabs(signal_2) <= threshold) return 2;
  return std::fabs(signal_1) <= std::fabs(signal_2) ? 1 : 2;
}

// Unwrap using whichever sensor of the pair is in its linear region.
inline UnwrapResult unwrap_quadrature(const QuadraturePair& pair, const FusionConfig& fcfg,
                                      double signal_1, double signal_2, double a_c) {
  const int selected = select_sensor(signal_1, signal_2, pair.sensor_a.n_atoms);
  UnwrapResult result = selected == 1 ? unwrap(pair.sensor_a, fcfg, signal_1, a_c)
                                      : unwrap(pair.sensor_b, fcfg, signal_2, a_c);
  result.sensor = selected;
  return result;
}

}  // namespace qfuse
