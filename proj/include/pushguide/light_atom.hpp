#pragma once

#include <cmath>

#include "pushguide/beam.hpp"
#include "pushguide/constants.hpp"
#include "pushguide/errors.hpp"
#include "pushguide/species.hpp"

namespace pushguide {

/// Stationary optical-pumping state of the beam: fraction eta of the atoms
/// sits in the upper hyperfine ground state, the rest in the lower one.
struct PumpingState {
  double eta = 0;                 // upper-state fraction
  double alpha = 0;               // (2F+3)/(2F+1)
  double effective_detuning = 0;  // delta_bar, rad/s
  bool approximation_valid = true;  // false once eta > 0.2
};

enum class PumpingBracket {
  Exact,          // (1 - eta) + eta ((delta_bar - Delta)/delta_bar)^2
  OnePlusAlpha,   // far-detuned shortcut 1 + alpha
};

/// Photon scattering rate (Gamma/2) s / (1 + s).
inline double scattering_rate(double s, const SpeciesParams& sp) {
  return 0.5 * sp.gamma * s / (1.0 + s);
}

/// Single detuning replacing the excited hyperfine manifold,
/// delta_bar = delta + Delta'_HFS / 2.
inline double effective_detuning(const BeamParams& beam, const SpeciesParams& sp) {
  return beam.detuning + 0.5 * sp.delta_hfs_excited;
}

/// Detuning seen from the lower hyperfine ground state.
inline double lower_state_detuning(double delta_bar, const SpeciesParams& sp) {
  return delta_bar - sp.delta_hfs_ground;
}

/// Stationary upper-state fraction eta = alpha (delta_bar/(delta_bar - Delta))^2.
inline PumpingState upper_state_fraction(const SpeciesParams& sp, double delta_bar) {
  const double denom = delta_bar - sp.delta_hfs_ground;
  if (std::abs(denom) < 1e-9 * sp.delta_hfs_ground)
    throw ModelError("pumping: laser resonant with the lower-state transition "
                     "(delta_bar = Delta_HFS)");
  PumpingState ps;
  ps.alpha = multiplicity_ratio(sp);
  ps.effective_detuning = delta_bar;
  const double r = delta_bar / denom;
  ps.eta = ps.alpha * r * r;
  ps.approximation_valid = ps.eta <= 0.2;
  return ps;
}

inline double pumping_bracket(const PumpingState& ps, const SpeciesParams& sp,
                              PumpingBracket mode) {
  if (mode == PumpingBracket::OnePlusAlpha) return 1.0 + ps.alpha;
  const double r = (ps.effective_detuning - sp.delta_hfs_ground) / ps.effective_detuning;
  return (1.0 - ps.eta) + ps.eta * r * r;
}

/// Lower-state saturation parameter on axis at height z.
inline double lower_state_saturation(const BeamParams& beam, const SpeciesParams& sp,
                                     double z) {
  return saturation_parameter(beam, sp,
                              lower_state_detuning(effective_detuning(beam, sp), sp), z);
}

/// Two-level on-axis light shift (hbar delta / 2) s, low-saturation form.
/// Negative for red detuning.
inline double two_level_light_shift(const BeamParams& beam, const SpeciesParams& sp,
                                    double z) {
  return 0.5 * constants::hbar * beam.detuning *
         saturation_parameter(beam, sp, beam.detuning, z);
}

/// Radiation-pressure force on the beam axis, averaged over the stationary
/// ground-state populations.  The transverse average factor accounts for the
/// finite cloud size in the Gaussian profile and applies to this longitudinal
/// force only.
inline double pushing_force(const BeamParams& beam, const SpeciesParams& sp,
                            const PumpingState& ps, double z,
                            PumpingBracket mode = PumpingBracket::Exact) {
  const double sbar = lower_state_saturation(beam, sp, z);
  return beam.transverse_average_factor * 0.5 * sp.gamma * constants::hbar *
         sp.wave_number() * sbar * pumping_bracket(ps, sp, mode);
}

/// Potential whose negative z-derivative is pushing_force, proportional to
/// zR arctan((z - z0)/zR).
inline double pushing_potential(const BeamParams& beam, const SpeciesParams& sp,
                                const PumpingState& ps, double z,
                                PumpingBracket mode = PumpingBracket::Exact) {
  const double s0 = lower_state_saturation(beam, sp, beam.focus_position);
  const double prefactor = beam.transverse_average_factor * 0.5 * sp.gamma *
                           constants::hbar * sp.wave_number() * s0 *
                           beam.rayleigh_length * pumping_bracket(ps, sp, mode);
  return -prefactor * std::atan((z - beam.focus_position) / beam.rayleigh_length);
}

/// On-axis guide depth: light shift of the lower ground state,
/// (hbar (delta_bar - Delta)/2) sbar(z).  Negative (attractive) below the
/// lower-state resonance.  No transverse average factor: this is an on-axis
/// quantity.
inline double guide_depth(const BeamParams& beam, const SpeciesParams& sp, double z) {
  const double d_low = lower_state_detuning(effective_detuning(beam, sp), sp);
  return 0.5 * constants::hbar * d_low * saturation_parameter(beam, sp, d_low, z);
}

/// Transverse oscillation frequency of the harmonic bottom of the guide,
/// sqrt(4 |U0(z)| / (M w(z)^2)).  Scales as 1/w^2(z).
inline double transverse_frequency(const BeamParams& beam, const SpeciesParams& sp,
                                   double z) {
  const double depth = std::abs(guide_depth(beam, sp, z));
  if (depth <= 0) throw ModelError("transverse frequency: no guide (zero depth)");
  const double w = waist_at(beam, z);
  return std::sqrt(4.0 * depth / (sp.mass * w * w));
}

}  // namespace pushguide
