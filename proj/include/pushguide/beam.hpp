#pragma once

#include <cmath>

#include "pushguide/constants.hpp"
#include "pushguide/errors.hpp"
#include "pushguide/species.hpp"

namespace pushguide {

/// Diverging Gaussian pushing-guiding beam.  The z axis points downwards
/// with its origin at the MOT1 centre; the focus usually lies above MOT1
/// (focus_position < 0).
struct BeamParams {
  double power = 0;           // P0, W
  double detuning = 0;        // rad/s from the cycling F -> F+1 line, red < 0
  double waist_min = 0;       // w0, m
  double focus_position = 0;  // z0, m
  double rayleigh_length = 0; // zR, m; 0 means "derive from w0 and lambda"
  double polarization_factor = 2.0 / 3.0;        // multiplies every saturation parameter
  double transverse_average_factor = 0.5;        // multiplies the longitudinal force only
};

inline double ideal_rayleigh_length(double waist_min, double wavelength) {
  return constants::pi * waist_min * waist_min / wavelength;
}

/// Fills the default Rayleigh length and checks the supplied one against the
/// ideal-Gaussian value (real beams deviate; beyond a factor 5 the input is
/// rejected as inconsistent).
inline void finalize(BeamParams& beam, const SpeciesParams& sp) {
  if (beam.power < 0) throw ConfigError("beam: power must be non-negative");
  if (beam.waist_min <= 0) throw ConfigError("beam: waist must be positive");
  if (beam.polarization_factor <= 0)
    throw ConfigError("beam: polarization factor must be positive");
  if (beam.transverse_average_factor <= 0)
    throw ConfigError("beam: transverse average factor must be positive");
  const double ideal = ideal_rayleigh_length(beam.waist_min, sp.wavelength);
  if (beam.rayleigh_length == 0) {
    beam.rayleigh_length = ideal;
  } else if (beam.rayleigh_length < 0) {
    throw ConfigError("beam: Rayleigh length must be positive");
  } else {
    const double ratio = beam.rayleigh_length / ideal;
    if (ratio > 5.0 || ratio < 0.2)
      throw ConfigError("beam: supplied Rayleigh length is inconsistent with the waist "
                        "(more than a factor 5 from pi*w0^2/lambda)");
  }
}

/// 1/e^2 radius at height z.
inline double waist_at(const BeamParams& beam, double z) {
  const double u = (z - beam.focus_position) / beam.rayleigh_length;
  return beam.waist_min * std::sqrt(1.0 + u * u);
}

/// On-axis intensity 2 P0 / (pi w(z)^2).
inline double peak_intensity(const BeamParams& beam, double z) {
  const double w = waist_at(beam, z);
  return 2.0 * beam.power / (constants::pi * w * w);
}

/// Saturation parameter at the given detuning, on axis at height z.  The
/// polarization factor is folded in here so every downstream quantity sees
/// the same convention.
inline double saturation_parameter(const BeamParams& beam, const SpeciesParams& sp,
                                   double detuning_used, double z) {
  const double d = detuning_used / sp.gamma;
  return beam.polarization_factor * (peak_intensity(beam, z) / saturation_intensity(sp)) /
         (1.0 + 4.0 * d * d);
}

}  // namespace pushguide
