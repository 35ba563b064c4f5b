#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "pushguide/beam.hpp"
#include "pushguide/light_atom.hpp"
#include "pushguide/species.hpp"

namespace pushguide {

enum class McGroundState { Lower, Upper };

/// One atom of the stochastic ensemble.
struct McAtom {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // m, z along the beam
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // m/s
  McGroundState ground_state = McGroundState::Lower;
};

struct McConfig {
  int n_atoms = 10000;
  std::uint64_t seed = 1;
  double time_step = 0;            // s; 0 = auto (expected scatterings/step ~ 0.08)
  double initial_temperature = 0;  // K
  double initial_radius = 0;       // m, Gaussian sigma of the starting cloud
  double entrance_velocity = 0;    // m/s along +z
  std::vector<double> record_grid; // ascending sample heights; empty = 101 uniform
  int threads = 1;

  // Diagnostic modes used by the test suite; not exposed in config files.
  bool dipole_force = true;
  bool scattering = true;
  std::optional<double> constant_rate;   // fixed scattering rate, 1/s
  std::optional<double> freeze_beam_at;  // evaluate the beam at this z only
  bool harmonic_transverse = false;      // linearized transverse confinement
  bool track_energy_drift = false;       // transverse-energy conservation probe
};

struct McRecord {
  double z = 0;
  double mean_vz = 0;     // m/s
  double stderr_vz = 0;   // m/s, standard error of the mean
  double t_h = 0;         // K, from the horizontal velocity variance
  double rms_radius = 0;  // m, about the beam axis
  long n_captured = 0;    // atoms with r < R(MOT2)
  long n = 0;
};

struct McStats {
  std::vector<McRecord> records;
  double mean_v_arrival = 0;
  double stddev_v_arrival = 0;
  double stderr_v_arrival = 0;
  long n_captured = 0;
  int n_atoms = 0;
  double upper_event_fraction = 0;  // scattering events labelled upper-state
  double max_energy_drift = 0;      // filled when track_energy_drift is set
  double time_step = 0;             // dt actually used, s
};

/// Propagates independent atoms through the diverging guide: deterministic
/// dipole force plus gravity, and discrete photon-scattering events with the
/// full recoil kinematics.  Bit-identical results for a fixed seed and
/// config, independent of the thread count.
McStats run_ensemble(const McConfig& config, const BeamParams& beam,
                     const SpeciesParams& species, const PumpingState& pumping,
                     const Geometry& geometry,
                     PumpingBracket bracket = PumpingBracket::Exact);

}  // namespace pushguide
