#pragma once

#include <cmath>
#include <string>

#include "pushguide/constants.hpp"
#include "pushguide/errors.hpp"

namespace pushguide {

/// Atomic constants of one D2-line alkali species.  All frequencies are
/// angular (rad/s); the wave number is derived from the wavelength.
struct SpeciesParams {
  std::string name;
  double gamma = 0;              // natural linewidth, rad/s
  double wavelength = 0;         // m
  double mass = 0;               // kg
  double delta_hfs_ground = 0;   // ground-state hyperfine interval, rad/s
  double delta_hfs_excited = 0;  // total excited-state hyperfine width, rad/s
  int f_lower = 0;               // lower ground-state F

  double wave_number() const { return constants::two_pi / wavelength; }
};

struct Geometry {
  double trap_separation = 0;  // D, m
  double mot2_radius = 0;      // R, trapping-beam radius at MOT2, m
  double mot1_radius = 0;      // extraction-region radius, m
  double gravity = constants::default_gravity;  // m/s^2
};

inline void validate(const SpeciesParams& sp) {
  if (sp.gamma <= 0) throw ConfigError("species: linewidth must be positive");
  if (sp.wavelength <= 0) throw ConfigError("species: wavelength must be positive");
  if (sp.mass <= 0) throw ConfigError("species: mass must be positive");
  if (sp.delta_hfs_ground <= 0)
    throw ConfigError("species: ground hyperfine interval must be positive");
  if (sp.delta_hfs_excited <= 0)
    throw ConfigError("species: excited hyperfine width must be positive");
  if (sp.f_lower < 1) throw ConfigError("species: f_lower must be >= 1");
}

inline void validate(const Geometry& g) {
  if (g.trap_separation <= 0) throw ConfigError("geometry: trap separation must be positive");
  if (g.mot2_radius <= 0) throw ConfigError("geometry: MOT2 radius must be positive");
  if (g.mot1_radius <= 0) throw ConfigError("geometry: MOT1 radius must be positive");
  if (g.mot1_radius >= g.trap_separation)
    throw ConfigError("geometry: MOT1 radius must be smaller than the trap separation");
}

/// Cs D2 line.  Linewidth and hyperfine intervals follow the working values
/// used throughout; wavelength and mass are the standard line data.
inline SpeciesParams cesium133() {
  SpeciesParams sp;
  sp.name = "Cs133";
  sp.gamma = constants::two_pi * 5.2e6;
  sp.wavelength = 852.34727582e-9;
  sp.mass = 2.20694650e-25;
  sp.delta_hfs_ground = constants::two_pi * 9.2e9;
  sp.delta_hfs_excited = constants::two_pi * 600e6;
  sp.f_lower = 3;
  return sp;
}

/// 87Rb D2 line.
inline SpeciesParams rubidium87() {
  SpeciesParams sp;
  sp.name = "Rb87";
  sp.gamma = constants::two_pi * 5.9e6;
  sp.wavelength = 780.241209686e-9;
  sp.mass = 1.44316060e-25;
  sp.delta_hfs_ground = constants::two_pi * 6.8e9;
  sp.delta_hfs_excited = constants::two_pi * 500e6;
  sp.f_lower = 1;
  return sp;
}

/// I_s = (1/6) hbar c k^3 Gamma / (2 pi), W/m^2.
inline double saturation_intensity(const SpeciesParams& sp) {
  const double k = sp.wave_number();
  return constants::hbar * constants::speed_of_light * k * k * k * sp.gamma /
         (6.0 * constants::two_pi);
}

struct RecoilQuantities {
  double velocity;     // hbar k / M, m/s
  double temperature;  // M v_rec^2 / k_B, K
};

inline RecoilQuantities recoil_quantities(const SpeciesParams& sp) {
  const double v = constants::hbar * sp.wave_number() / sp.mass;
  return {v, sp.mass * v * v / constants::k_boltzmann};
}

/// Maximal arrival speed recapturable over the MOT2 beam radius,
/// sqrt(Gamma R v_rec).
inline double capture_velocity(const SpeciesParams& sp, const Geometry& g) {
  return std::sqrt(sp.gamma * g.mot2_radius * recoil_quantities(sp).velocity);
}

/// Ratio of ground-state multiplicities (2F+3)/(2F+1).
inline double multiplicity_ratio(const SpeciesParams& sp) {
  return double(2 * sp.f_lower + 3) / double(2 * sp.f_lower + 1);
}

}  // namespace pushguide
