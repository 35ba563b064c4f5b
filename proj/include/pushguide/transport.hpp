#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pushguide/beam.hpp"
#include "pushguide/light_atom.hpp"
#include "pushguide/species.hpp"

namespace pushguide {

struct ModelOptions {
  PumpingBracket bracket = PumpingBracket::Exact;
  double f_exponent = 10.0;   // conditional score f(x) = 1/(1 + x^f_exponent)
  int grid_points = 2000;     // cached time-integral grid

  // Diagnostic switches for the test suite.
  bool disable_heating = false;     // drop the scattering term of the T_h equation
  double guide_depth_scale = 1.0;   // scales |U0| in the exit condition only
};

/// State of the beam sampled at one height.
struct TransportState {
  double z = 0;        // m, below the MOT1 centre
  double v = 0;        // m/s
  double t_h = 0;      // horizontal kinetic temperature, K
  double delta_r = 0;  // rms transverse radius, m
  bool guided = true;
};

struct TransportProfile {
  std::vector<TransportState> samples;  // strictly increasing z, 0..D
  std::optional<double> z_out;          // none when the guide holds up to D
  bool never_guided = false;
  bool reentry_detected = false;
  TransportState arrival;
  double travel_time = 0;  // s
};

struct EfficiencyReport {
  double two_level_score = 0;
  double refined_score = 0;
  double v0 = 0;             // m/s
  double v_arrival = 0;      // m/s
  double travel_time = 0;    // s
  std::optional<double> z_out;
  double delta_r_out = 0;    // m
  double delta_r_arrival = 0;  // m
  double t_h_exit = 0;       // K
  double eta = 0;
  double max_adiabaticity = 0;
  std::vector<std::string> validity_flags;
};

/// Conditional efficiency weight f(x) = 1 / (1 + x^p).
inline double conditional_score(double x, double exponent = 10.0) {
  return 1.0 / (1.0 + std::pow(x, exponent));
}

/// Longitudinal and transverse dynamics from MOT1 to MOT2.  Everything is
/// precomputed on construction; a built model is immutable and can be
/// queried concurrently.
class TransportModel {
 public:
  TransportModel(const SpeciesParams& species, const BeamParams& beam,
                 const Geometry& geometry, double entrance_temperature,
                 const ModelOptions& opts = {},
                 std::optional<double> v0_override = std::nullopt);

  const SpeciesParams& species() const { return species_; }
  const BeamParams& beam() const { return beam_; }
  const Geometry& geometry() const { return geometry_; }
  const PumpingState& pumping() const { return pumping_; }
  const ModelOptions& options() const { return opts_; }
  double entrance_temperature() const { return t0_; }

  double entrance_velocity() const { return v0_; }
  double velocity(double z) const;
  double pushing_potential_at(double z) const;
  double guide_depth_at(double z) const { return guide_depth(beam_, species_, z); }
  double transverse_frequency_at(double z) const {
    return transverse_frequency(beam_, species_, z);
  }

  /// Time to travel from the guide entrance to height z (cached grid with
  /// linear interpolation; good to ~1e-8 s on the default grid, see the
  /// notes in the implementation).
  double time_to(double z) const;
  /// Full travel time by adaptive quadrature of 1/v to 1e-8 relative.
  double travel_time() const;

  /// Closed-form temperature of the guided beam (adiabatic scaling plus the
  /// accumulated scattering heating).
  double horizontal_temperature(double z) const;
  /// Direct numerical integration of the temperature rate equation; used to
  /// cross-check the closed form.  Heights must be ascending.
  std::vector<double> horizontal_temperature_ode(const std::vector<double>& heights) const;

  std::optional<double> guide_exit() const { return z_out_; }
  bool never_guided() const { return never_guided_; }
  bool reentry_detected() const { return reentry_; }

  /// Temperature where guiding ends (frozen for the ballistic phase); equals
  /// the arrival-temperature when the guide holds all the way.
  double exit_temperature() const { return t_exit_; }
  /// Profile temperature: the guided expression up to the exit, frozen after.
  double profile_temperature(double z) const;
  /// rms transverse radius, guided formula up to the exit, ballistic after.
  double cloud_radius(double z) const;
  double delta_r_out() const { return delta_r_out_; }

  /// Adiabaticity diagnostic |d omega_p/dt| / omega_p^2.
  double adiabaticity_at(double z) const;

  TransportProfile profile() const;
  EfficiencyReport report() const;

 private:
  double eq16_temperature(double z) const;
  double exit_condition(double z) const;  // 2 kB T_h - |U0| (scaled)
  void build_time_grid();
  void locate_guide_exit();

  SpeciesParams species_;
  BeamParams beam_;
  Geometry geometry_;
  ModelOptions opts_;
  double t0_ = 0;

  PumpingState pumping_;
  double delta_low_ = 0;     // delta_bar - Delta_HFS
  double s0_lower_ = 0;      // lower-state saturation at the focus
  double sbar_entry_ = 0;    // lower-state saturation at z = 0
  double push_coeff_ = 0;    // Gamma v_rec s0 zR bracket chi
  double heating_rate_ = 0;  // K/s at the guide entrance
  double v0_ = 0;

  std::vector<double> z_grid_;
  std::vector<double> t_grid_;

  std::optional<double> z_out_;
  bool never_guided_ = false;
  bool reentry_ = false;
  double t_exit_ = 0;
  double t_out_time_ = 0;     // travel time at the exit point
  double delta_r_out_ = 0;
  double exit_eval_z_ = 0;    // z_out when present, else D
  std::vector<std::string> flags_;
};

struct TwoLevelResult {
  double score = 0;
  double v_arrival = 0;    // m/s
  double t_h_arrival = 0;  // K
  double depth = 0;        // |U0|, J
  double travel_time = 0;  // s, equals 2D / v_arrival for the sqrt(z) profile
  bool saturation_large = false;  // s > 0.1 at the frozen waist
};

/// Constant-waist two-level model: no gravity, no pumping, no initial
/// velocity or temperature, waist frozen at its MOT1 value.  A deliberately
/// separate code path from the full transport model.
TwoLevelResult two_level_details(const SpeciesParams& species, const BeamParams& beam,
                                 const Geometry& geometry, double f_exponent = 10.0);

double two_level_efficiency(const SpeciesParams& species, const BeamParams& beam,
                            const Geometry& geometry, double f_exponent = 10.0);

}  // namespace pushguide
