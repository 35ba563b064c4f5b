#pragma once

#include "pushguide/beam.hpp"
#include "pushguide/species.hpp"
#include "pushguide/units.hpp"

namespace pushguide::testing {

// The two reference setups, identical to configs/*.cfg.

inline BeamParams cs_beam() {
  BeamParams b;
  b.power = 63e-3;
  b.detuning = -2.0 * units::gigahertz_angular;
  b.waist_min = 200e-6;
  b.focus_position = -0.34;
  b.rayleigh_length = 0.110;
  return b;
}

inline BeamParams rb_beam() {
  BeamParams b;
  b.power = 21e-3;
  b.detuning = -1.0 * units::gigahertz_angular;
  b.waist_min = 300e-6;
  b.focus_position = -0.13;
  b.rayleigh_length = 0.260;
  return b;
}

inline Geometry cs_geometry() {
  Geometry g;
  g.trap_separation = 0.57;
  g.mot2_radius = 4e-3;
  g.mot1_radius = 10e-3;
  return g;
}

inline Geometry rb_geometry() {
  Geometry g;
  g.trap_separation = 0.72;
  g.mot2_radius = 4e-3;
  g.mot1_radius = 10e-3;
  return g;
}

inline constexpr double cs_t0 = 25e-6;
inline constexpr double rb_t0 = 40e-6;

}  // namespace pushguide::testing
