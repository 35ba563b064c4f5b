#include "pushguide/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pushguide/numerics.hpp"

namespace pushguide {

namespace {

constexpr double kExitTolerance = 1e-4;  // m, bisection resolution for z_out

// arctan((z - z0)/zR) + arctan(z0/zR); zero at z = 0.
double atan_bracket(const BeamParams& beam, double z) {
  return std::atan((z - beam.focus_position) / beam.rayleigh_length) +
         std::atan(beam.focus_position / beam.rayleigh_length);
}

// w^2(0) / w^2(z)
double waist_sq_ratio(const BeamParams& beam, double z) {
  const double z0 = beam.focus_position;
  const double zr2 = beam.rayleigh_length * beam.rayleigh_length;
  return (z0 * z0 + zr2) / ((z - z0) * (z - z0) + zr2);
}

}  // namespace

TransportModel::TransportModel(const SpeciesParams& species, const BeamParams& beam,
                               const Geometry& geometry, double entrance_temperature,
                               const ModelOptions& opts,
                               std::optional<double> v0_override)
    : species_(species), beam_(beam), geometry_(geometry), opts_(opts),
      t0_(entrance_temperature) {
  validate(species_);
  validate(geometry_);
  if (beam_.waist_min <= 0 || beam_.rayleigh_length <= 0)
    throw ConfigError("transport: beam parameters not finalized");
  if (t0_ < 0) throw ConfigError("transport: entrance temperature must be non-negative");

  const double delta_bar = effective_detuning(beam_, species_);
  pumping_ = upper_state_fraction(species_, delta_bar);
  delta_low_ = lower_state_detuning(delta_bar, species_);
  if (!pumping_.approximation_valid) flags_.push_back("eta_above_0.2");
  if (std::abs(beam_.detuning) < constants::two_pi * 1e9)
    flags_.push_back("mean_detuning_below_1GHz");

  const double D = geometry_.trap_separation;
  s0_lower_ = saturation_parameter(beam_, species_, delta_low_, beam_.focus_position);
  sbar_entry_ = saturation_parameter(beam_, species_, delta_low_, 0.0);

  // The low-saturation replacement ln(1+s) -> s underpins every formula
  // below; past s = 0.1 on the trajectory the model is no longer meaningful.
  const double z_nearest_focus = std::clamp(beam_.focus_position, 0.0, D);
  if (saturation_parameter(beam_, species_, delta_low_, z_nearest_focus) > 0.1)
    throw ModelError("transport: lower-state saturation parameter exceeds 0.1 on the "
                     "trajectory; the low-saturation model does not apply");

  const auto recoil = recoil_quantities(species_);
  const double bracket = pumping_bracket(pumping_, species_, opts_.bracket);
  const double chi = beam_.transverse_average_factor;

  if (v0_override) {
    v0_ = *v0_override;
    if (v0_ < 0) throw ConfigError("transport: entrance velocity must be non-negative");
  } else {
    // Inside the MOT1 region the repumper keeps the atoms in the upper
    // state; integrate that force (plus gravity) from rest over the
    // extraction radius.
    const double s_up0 = saturation_parameter(beam_, species_, delta_bar,
                                              beam_.focus_position);
    const double r1 = geometry_.mot1_radius;
    const double v0_sq = 2.0 * geometry_.gravity * r1 +
                         species_.gamma * recoil.velocity * s_up0 *
                             beam_.rayleigh_length * chi * atan_bracket(beam_, r1);
    v0_ = std::sqrt(v0_sq);
  }

  push_coeff_ = species_.gamma * recoil.velocity * s0_lower_ * beam_.rayleigh_length *
                bracket * chi;
  heating_rate_ = opts_.disable_heating
                      ? 0.0
                      : (recoil.temperature / 6.0) * 0.5 * species_.gamma * sbar_entry_;

  build_time_grid();
  locate_guide_exit();

  exit_eval_z_ = z_out_ ? *z_out_ : D;
  t_exit_ = eq16_temperature(exit_eval_z_);
  t_out_time_ = time_to(exit_eval_z_);
  const double depth_exit = std::abs(guide_depth_at(exit_eval_z_));
  if (depth_exit > 0) {
    delta_r_out_ = std::sqrt(constants::k_boltzmann * t_exit_ / species_.mass) /
                   transverse_frequency_at(exit_eval_z_);
  } else {
    delta_r_out_ = std::numeric_limits<double>::infinity();
    flags_.push_back("no_guide");
  }
  if (never_guided_) flags_.push_back("never_guided");
  if (reentry_) flags_.push_back("guide_reentry_ignored");
}

double TransportModel::velocity(double z) const {
  const double arg = v0_ * v0_ + 2.0 * geometry_.gravity * z +
                     push_coeff_ * atan_bracket(beam_, z);
  return std::sqrt(std::max(arg, 0.0));
}

double TransportModel::pushing_potential_at(double z) const {
  return pushing_potential(beam_, species_, pumping_, z, opts_.bracket);
}

void TransportModel::build_time_grid() {
  // Cumulative Simpson of 1/v on a uniform grid.  With the default 2000
  // intervals the per-interval error is far below 1e-10 s; the linear
  // interpolation between nodes adds at most a few 1e-9 s, which is
  // negligible against the 0.1 mm exit-search resolution that consumes it.
  const double D = geometry_.trap_separation;
  const int n = std::max(opts_.grid_points, 16);
  z_grid_.resize(std::size_t(n) + 1);
  t_grid_.resize(std::size_t(n) + 1);
  const double h = D / n;
  t_grid_[0] = 0.0;
  for (int i = 0; i <= n; ++i) z_grid_[std::size_t(i)] = i * h;
  z_grid_.back() = D;

  auto inv_v = [this](double z) { return 1.0 / velocity(z); };
  for (int i = 0; i < n; ++i) {
    const double a = z_grid_[std::size_t(i)];
    const double b = z_grid_[std::size_t(i) + 1];
    double seg;
    if (i == 0 && v0_ < 1e-12) {
      // integrable 1/sqrt(z) start: substitute z = u^2 (u floored so the
      // 0/0 at the origin evaluates to the finite limit)
      auto g = [&](double u) {
        u = std::max(u, 1e-150);
        return 2.0 * u / velocity(u * u);
      };
      seg = numerics::adaptive_simpson(g, 0.0, std::sqrt(b), 1e-10, 1e-16);
    } else {
      const double m = 0.5 * (a + b);
      seg = (b - a) / 6.0 * (inv_v(a) + 4.0 * inv_v(m) + inv_v(b));
    }
    t_grid_[std::size_t(i) + 1] = t_grid_[std::size_t(i)] + seg;
  }
}

double TransportModel::time_to(double z) const {
  return numerics::interp_linear(z_grid_, t_grid_, z);
}

double TransportModel::travel_time() const {
  const double D = geometry_.trap_separation;
  if (v0_ < 1e-12) {
    auto g = [this](double u) {
      u = std::max(u, 1e-150);
      return 2.0 * u / velocity(u * u);
    };
    return numerics::adaptive_simpson(g, 0.0, std::sqrt(D), 1e-8);
  }
  auto inv_v = [this](double z) {
    const double v = velocity(z);
    if (!(v > 0)) throw ModelError("travel time: non-positive velocity on the path");
    return 1.0 / v;
  };
  return numerics::adaptive_simpson(inv_v, 0.0, D, 1e-8);
}

double TransportModel::eq16_temperature(double z) const {
  return waist_sq_ratio(beam_, z) * (t0_ + heating_rate_ * time_to(z));
}

double TransportModel::horizontal_temperature(double z) const {
  return eq16_temperature(z);
}

std::vector<double> TransportModel::horizontal_temperature_ode(
    const std::vector<double>& heights) const {
  // Fixed-step RK4 on dT/dz = -T (2/w) dw/dz + (T_rec/6)(w0^2(0)/w^2) (Gamma/2)
  // sbar(0) / v, segment by segment so every requested height is a node.
  const auto recoil = recoil_quantities(species_);
  const double heat0 = opts_.disable_heating
                           ? 0.0
                           : (recoil.temperature / 6.0) * 0.5 * species_.gamma * sbar_entry_;
  auto rhs = [&](double z, double T) {
    const double w = waist_at(beam_, z);
    const double dw = beam_.waist_min * beam_.waist_min * (z - beam_.focus_position) /
                      (beam_.rayleigh_length * beam_.rayleigh_length * w);
    return -T * 2.0 * dw / w + heat0 * waist_sq_ratio(beam_, z) / velocity(z);
  };

  std::vector<double> out;
  out.reserve(heights.size());
  double z = 0.0;
  double T = t0_;
  const double h_target = geometry_.trap_separation / 20000.0;
  for (double zq : heights) {
    if (zq < z) throw ConfigError("temperature ODE: heights must be ascending");
    const double len = zq - z;
    const int steps = std::max(1, int(std::ceil(len / h_target)));
    const double h = len / steps;
    for (int i = 0; i < steps; ++i) {
      const double k1 = rhs(z, T);
      const double k2 = rhs(z + 0.5 * h, T + 0.5 * h * k1);
      const double k3 = rhs(z + 0.5 * h, T + 0.5 * h * k2);
      const double k4 = rhs(z + h, T + h * k3);
      T += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      z += h;
    }
    z = zq;
    out.push_back(T);
  }
  return out;
}

double TransportModel::exit_condition(double z) const {
  return 2.0 * constants::k_boltzmann * eq16_temperature(z) -
         opts_.guide_depth_scale * std::abs(guide_depth_at(z));
}

void TransportModel::locate_guide_exit() {
  const double D = geometry_.trap_separation;
  if (exit_condition(0.0) >= 0.0) {
    never_guided_ = true;
    z_out_ = 0.0;
    return;
  }
  // Scan the cached grid for the first sign change, then bisect.  The
  // condition can in principle re-enter further down; that is reported and
  // ignored.
  std::optional<double> found;
  double prev_z = 0.0;
  double prev_g = exit_condition(0.0);
  for (std::size_t i = 1; i < z_grid_.size(); ++i) {
    const double g = exit_condition(z_grid_[i]);
    if (!found && prev_g < 0.0 && g >= 0.0) {
      found = numerics::bisect([this](double z) { return exit_condition(z); }, prev_z,
                               z_grid_[i], kExitTolerance);
    } else if (found && prev_g > 0.0 && g <= 0.0) {
      reentry_ = true;
      break;
    }
    prev_z = z_grid_[i];
    prev_g = g;
  }
  z_out_ = found;
}

double TransportModel::profile_temperature(double z) const {
  if (z <= exit_eval_z_) return eq16_temperature(z);
  return t_exit_;
}

double TransportModel::cloud_radius(double z) const {
  if (z <= exit_eval_z_ && !never_guided_) {
    const double depth = std::abs(guide_depth_at(z));
    if (depth <= 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(constants::k_boltzmann * eq16_temperature(z) / species_.mass) /
           transverse_frequency_at(z);
  }
  const double dt = time_to(z) - t_out_time_;
  const double vth_sq = constants::k_boltzmann * t_exit_ / species_.mass;
  return std::sqrt(delta_r_out_ * delta_r_out_ + vth_sq * dt * dt);
}

double TransportModel::adiabaticity_at(double z) const {
  // omega_p ~ 1/w^2, so |d omega_p/dt|/omega_p^2 = 2 |w'| v / (w omega_p).
  const double w = waist_at(beam_, z);
  const double dw = beam_.waist_min * beam_.waist_min *
                    std::abs(z - beam_.focus_position) /
                    (beam_.rayleigh_length * beam_.rayleigh_length * w);
  return 2.0 * dw * velocity(z) / (w * transverse_frequency_at(z));
}

TransportProfile TransportModel::profile() const {
  TransportProfile p;
  p.z_out = never_guided_ ? std::optional<double>(0.0) : z_out_;
  p.never_guided = never_guided_;
  p.reentry_detected = reentry_;
  p.samples.reserve(z_grid_.size());
  for (double z : z_grid_) {
    TransportState s;
    s.z = z;
    s.v = velocity(z);
    s.t_h = profile_temperature(z);
    s.delta_r = cloud_radius(z);
    s.guided = z <= exit_eval_z_ && !never_guided_;
    p.samples.push_back(s);
  }
  p.arrival = p.samples.back();
  p.travel_time = travel_time();
  return p;
}

EfficiencyReport TransportModel::report() const {
  EfficiencyReport r;
  const double D = geometry_.trap_separation;
  r.v0 = v0_;
  r.v_arrival = velocity(D);
  r.travel_time = travel_time();
  r.z_out = never_guided_ ? std::optional<double>(0.0) : z_out_;
  r.delta_r_out = delta_r_out_;
  r.delta_r_arrival = cloud_radius(D);
  r.t_h_exit = t_exit_;
  r.eta = pumping_.eta;
  r.validity_flags = flags_;

  double max_ad = 0.0;
  if (beam_.power > 0) {
    for (double z : z_grid_) {
      if (z > exit_eval_z_) break;
      max_ad = std::max(max_ad, adiabaticity_at(z));
    }
  }
  r.max_adiabaticity = max_ad;

  const double vcap = capture_velocity(species_, geometry_);
  r.refined_score = conditional_score(r.delta_r_arrival / geometry_.mot2_radius,
                                      opts_.f_exponent) *
                    conditional_score(r.v_arrival / vcap, opts_.f_exponent);
  r.two_level_score = two_level_efficiency(species_, beam_, geometry_, opts_.f_exponent);
  return r;
}

TwoLevelResult two_level_details(const SpeciesParams& species, const BeamParams& beam,
                                 const Geometry& geometry, double f_exponent) {
  // Waist frozen at the MOT1 value; gravity, pumping, entrance velocity and
  // initial temperature all dropped.
  BeamParams frozen = beam;
  frozen.waist_min = waist_at(beam, 0.0);
  frozen.focus_position = 0.0;
  const double s = saturation_parameter(frozen, species, beam.detuning, 0.0);
  const double gamma_prime = scattering_rate(s, species);
  const auto recoil = recoil_quantities(species);
  const double D = geometry.trap_separation;

  TwoLevelResult out;
  out.saturation_large = s > 0.1;
  out.v_arrival = std::sqrt(2.0 * gamma_prime * recoil.velocity * D);
  out.t_h_arrival = (out.v_arrival / recoil.velocity) * recoil.temperature / 6.0;
  out.depth = std::abs(0.5 * constants::hbar * beam.detuning * s);
  out.travel_time = out.v_arrival > 0 ? 2.0 * D / out.v_arrival
                                      : std::numeric_limits<double>::infinity();
  if (out.depth <= 0) {
    out.score = 0.0;
    return out;
  }
  const double vcap = capture_velocity(species, geometry);
  out.score = conditional_score(
                  2.0 * constants::k_boltzmann * out.t_h_arrival / out.depth,
                  f_exponent) *
              conditional_score(out.v_arrival / vcap, f_exponent);
  return out;
}

double two_level_efficiency(const SpeciesParams& species, const BeamParams& beam,
                            const Geometry& geometry, double f_exponent) {
  return two_level_details(species, beam, geometry, f_exponent).score;
}

}  // namespace pushguide
