#pragma once

#include "pushguide/constants.hpp"

namespace pushguide::units {

// Multiply a user-facing value by one of these factors to obtain internal SI.
// Frequencies are cyclic on the user side (MHz of delta/2pi) and angular
// (rad/s) internally.
inline constexpr double milliwatt = 1e-3;
inline constexpr double microwatt = 1e-6;
inline constexpr double nanometre = 1e-9;
inline constexpr double micrometre = 1e-6;
inline constexpr double millimetre = 1e-3;
inline constexpr double centimetre = 1e-2;
inline constexpr double microkelvin = 1e-6;
inline constexpr double microsecond = 1e-6;
inline constexpr double millisecond = 1e-3;
inline constexpr double hertz_angular = constants::two_pi;
inline constexpr double kilohertz_angular = constants::two_pi * 1e3;
inline constexpr double megahertz_angular = constants::two_pi * 1e6;
inline constexpr double gigahertz_angular = constants::two_pi * 1e9;

inline constexpr double to_si(double value, double factor) { return value * factor; }
inline constexpr double from_si(double value, double factor) { return value / factor; }

}  // namespace pushguide::units
