#pragma once

namespace pushguide::constants {

inline constexpr double pi = 3.141592653589793;
inline constexpr double two_pi = 2.0 * pi;

// CODATA values, 10 significant figures.
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double k_boltzmann = 1.380649e-23;      // J/K (exact)
inline constexpr double speed_of_light = 299792458.0;    // m/s (exact)
inline constexpr double atomic_mass_unit = 1.660539067e-27;  // kg

inline constexpr double default_gravity = 9.81;  // m/s^2

}  // namespace pushguide::constants
