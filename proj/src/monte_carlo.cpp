#include "pushguide/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "pushguide/numerics.hpp"

namespace pushguide {

namespace {

constexpr int kChunk = 512;          // fixed work unit, keeps reductions thread-invariant
constexpr double kAutoLambda = 0.08; // target expected scatterings per step

struct Context {
  // beam/species scalars
  double z0, zr, zr2, w0, w0sq;
  double mass, gravity, v_rec;
  double s_focus;       // lower-state saturation at the focus (pol factor inside)
  double u_focus;       // guide depth at the focus, J (negative)
  double rate_coeff;    // Gamma/2 * bracket
  double gamma_half;    // Gamma/2
  double bracket;
  double eta;
  double capture_r2;    // R^2 of MOT2
  double d_total;       // D
  // modes
  bool dipole, scatter, harmonic;
  std::optional<double> const_rate;
  std::optional<double> frozen_z;

  double beam_z(double z) const { return frozen_z ? *frozen_z : z; }

  double waist_sq(double z) const {
    const double u = beam_z(z) - z0;
    return w0sq * (1.0 + u * u / zr2);
  }

  double sbar(double z) const {
    const double u = beam_z(z) - z0;
    return s_focus * zr2 / (u * u + zr2);
  }

  double depth(double z) const {
    const double u = beam_z(z) - z0;
    return u_focus * zr2 / (u * u + zr2);
  }

  // local scattering rate for the population-averaged event stream
  double rate(double s_local) const {
    if (const_rate) return *const_rate;
    return rate_coeff * s_local / (1.0 + s_local);
  }
};

struct Accumulator {
  std::vector<double> sum_vz, sum_vz2, sum_vt2, sum_r2;
  std::vector<long> count, captured;
  long events = 0;
  long upper_events = 0;
  double max_energy_drift = 0;

  explicit Accumulator(std::size_t n)
      : sum_vz(n, 0.0), sum_vz2(n, 0.0), sum_vt2(n, 0.0), sum_r2(n, 0.0),
        count(n, 0), captured(n, 0) {}

  void merge(const Accumulator& o) {
    for (std::size_t i = 0; i < sum_vz.size(); ++i) {
      sum_vz[i] += o.sum_vz[i];
      sum_vz2[i] += o.sum_vz2[i];
      sum_vt2[i] += o.sum_vt2[i];
      sum_r2[i] += o.sum_r2[i];
      count[i] += o.count[i];
      captured[i] += o.captured[i];
    }
    events += o.events;
    upper_events += o.upper_events;
    max_energy_drift = std::max(max_energy_drift, o.max_energy_drift);
  }
};

Eigen::Vector3d acceleration(const Context& c, const Eigen::Vector3d& p) {
  Eigen::Vector3d a(0.0, 0.0, c.gravity);
  if (!c.dipole) return a;
  const double r2 = p.x() * p.x() + p.y() * p.y();
  const double w2 = c.waist_sq(p.z());
  if (c.harmonic) {
    const double om2 = 4.0 * std::abs(c.depth(p.z())) / (c.mass * w2);
    a.x() -= om2 * p.x();
    a.y() -= om2 * p.y();
    return a;
  }
  const double u0 = c.depth(p.z());
  const double e = std::exp(-2.0 * r2 / w2);
  const double coeff = 4.0 * u0 * e / (c.mass * w2);  // u0 < 0: restoring
  a.x() += coeff * p.x();
  a.y() += coeff * p.y();
  if (!c.frozen_z) {
    const double u = p.z() - c.z0;
    const double du0 = u0 * (-2.0 * u) / (u * u + c.zr2);           // dU0/dz
    const double w = std::sqrt(w2);
    const double dw = c.w0sq * u / (c.zr2 * w);                     // dw/dz
    const double dU = du0 * e + u0 * e * 4.0 * r2 * dw / (w2 * w);  // dU/dz
    a.z() -= dU / c.mass;
  }
  return a;
}

void propagate_atom(const Context& c, std::uint64_t seed, double dt, double v0,
                    double sigma_r, double sigma_v, const std::vector<double>& grid,
                    bool track_energy, Accumulator& acc, long max_steps) {
  numerics::SplitMix64 rng(seed);
  Eigen::Vector3d pos(sigma_r * rng.normal(), sigma_r * rng.normal(), 0.0);
  Eigen::Vector3d vel(sigma_v * rng.normal(), sigma_v * rng.normal(),
                      v0 + sigma_v * rng.normal());
  McGroundState state = McGroundState::Lower;

  double e0 = 0.0, e_scale = 1.0;
  if (track_energy) {
    const double r2 = pos.x() * pos.x() + pos.y() * pos.y();
    e0 = 0.5 * c.mass * (vel.x() * vel.x() + vel.y() * vel.y()) +
         c.depth(pos.z()) * std::exp(-2.0 * r2 / c.waist_sq(pos.z()));
    e_scale = std::max(std::abs(e0), std::abs(c.depth(pos.z())));
  }

  Eigen::Vector3d acc_cached = acceleration(c, pos);
  std::size_t next_rec = 0;
  long steps = 0;
  while (next_rec < grid.size()) {
    if (++steps > max_steps)
      throw NumericsError("monte carlo: atom did not reach the recapture region "
                          "(step budget exhausted)");
    const Eigen::Vector3d pos_prev = pos;
    const Eigen::Vector3d vel_prev = vel;

    // velocity Verlet (kick-drift-kick)
    vel += 0.5 * dt * acc_cached;
    pos += dt * vel;
    acc_cached = acceleration(c, pos);
    vel += 0.5 * dt * acc_cached;

    if (c.scatter) {
      const double r2 = pos.x() * pos.x() + pos.y() * pos.y();
      const double w2 = c.waist_sq(pos.z());
      const double s_local = c.sbar(pos.z()) * std::exp(-2.0 * r2 / w2);
      const double lambda = c.rate(s_local) * dt;
      // Poisson number of events this step (Knuth inversion, small lambda)
      int k = 0;
      const double limit = std::exp(-lambda);
      double prod = rng.uniform();
      while (prod > limit) {
        ++k;
        prod *= rng.uniform();
      }
      for (int i = 0; i < k; ++i) {
        // absorbed photon along +z, spontaneous recoil uniform on the sphere
        const double cz = 1.0 - 2.0 * rng.uniform();
        const double st = std::sqrt(std::max(0.0, 1.0 - cz * cz));
        const double phi = constants::two_pi * rng.uniform();
        vel.z() += c.v_rec * (1.0 + cz);
        vel.x() += c.v_rec * st * std::cos(phi);
        vel.y() += c.v_rec * st * std::sin(phi);
        state = rng.uniform() < c.eta ? McGroundState::Upper : McGroundState::Lower;
        ++acc.events;
        if (state == McGroundState::Upper) ++acc.upper_events;
      }
    }

    if (track_energy) {
      const double r2 = pos.x() * pos.x() + pos.y() * pos.y();
      const double e = 0.5 * c.mass * (vel.x() * vel.x() + vel.y() * vel.y()) +
                       c.depth(pos.z()) * std::exp(-2.0 * r2 / c.waist_sq(pos.z()));
      acc.max_energy_drift = std::max(acc.max_energy_drift,
                                      std::abs(e - e0) / e_scale);
    }

    // record every sample height crossed during this step
    while (next_rec < grid.size() && pos.z() >= grid[next_rec]) {
      const double dz = pos.z() - pos_prev.z();
      const double f = dz > 0 ? (grid[next_rec] - pos_prev.z()) / dz : 1.0;
      const Eigen::Vector3d pi = pos_prev + f * (pos - pos_prev);
      const Eigen::Vector3d vi = vel_prev + f * (vel - vel_prev);
      acc.sum_vz[next_rec] += vi.z();
      acc.sum_vz2[next_rec] += vi.z() * vi.z();
      acc.sum_vt2[next_rec] += vi.x() * vi.x() + vi.y() * vi.y();
      const double ri2 = pi.x() * pi.x() + pi.y() * pi.y();
      acc.sum_r2[next_rec] += ri2;
      acc.count[next_rec] += 1;
      if (ri2 < c.capture_r2) acc.captured[next_rec] += 1;
      ++next_rec;
    }
  }
}

}  // namespace

McStats run_ensemble(const McConfig& config, const BeamParams& beam,
                     const SpeciesParams& species, const PumpingState& pumping,
                     const Geometry& geometry, PumpingBracket bracket) {
  if (config.n_atoms < 1) throw ConfigError("monte carlo: need at least one atom");
  if (config.initial_temperature < 0 || config.initial_radius < 0)
    throw ConfigError("monte carlo: initial conditions must be non-negative");

  Context c;
  c.z0 = beam.focus_position;
  c.zr = beam.rayleigh_length;
  c.zr2 = c.zr * c.zr;
  c.w0 = beam.waist_min;
  c.w0sq = c.w0 * c.w0;
  c.mass = species.mass;
  c.gravity = geometry.gravity;
  c.v_rec = recoil_quantities(species).velocity;
  const double d_low = lower_state_detuning(pumping.effective_detuning, species);
  c.s_focus = saturation_parameter(beam, species, d_low, beam.focus_position);
  c.u_focus = 0.5 * constants::hbar * d_low * c.s_focus;
  c.bracket = pumping_bracket(pumping, species, bracket);
  c.gamma_half = 0.5 * species.gamma;
  c.rate_coeff = c.gamma_half * c.bracket;
  c.eta = pumping.eta;
  c.capture_r2 = geometry.mot2_radius * geometry.mot2_radius;
  c.d_total = geometry.trap_separation;
  c.dipole = config.dipole_force;
  c.scatter = config.scattering;
  c.harmonic = config.harmonic_transverse;
  c.const_rate = config.constant_rate;
  c.frozen_z = config.freeze_beam_at;

  // peak on-axis rate along the path fixes the automatic time step
  const double z_peak = c.frozen_z ? *c.frozen_z
                                   : std::clamp(c.z0, 0.0, c.d_total);
  double rate_max = c.const_rate ? *c.const_rate : c.rate(c.sbar(z_peak));
  rate_max = std::max(rate_max, 1e-12);
  double dt = config.time_step;
  if (dt <= 0) {
    dt = kAutoLambda / rate_max;
    // keep the integrator resolution sane even when scattering is feeble
    const double depth_peak = std::abs(c.depth(z_peak));
    if (depth_peak > 0) {
      const double omega = std::sqrt(4.0 * depth_peak / (c.mass * c.waist_sq(z_peak)));
      dt = std::min(dt, 0.02 * constants::two_pi / omega);
    }
    dt = std::min(dt, 1e-4);
  } else if (c.scatter && rate_max * dt > 0.5) {
    throw ConfigError("monte carlo: time step too coarse, expected scatterings per "
                      "step exceed 0.5");
  }

  std::vector<double> grid = config.record_grid;
  if (grid.empty()) {
    grid.resize(101);
    for (int i = 0; i <= 100; ++i) grid[std::size_t(i)] = c.d_total * i / 100.0;
  }
  if (grid.back() < c.d_total) grid.push_back(c.d_total);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ConfigError("monte carlo: record grid must be strictly ascending");

  const double sigma_v = std::sqrt(constants::k_boltzmann * config.initial_temperature /
                                   species.mass);
  const long max_steps = 200'000'000;

  const int n_chunks = (config.n_atoms + kChunk - 1) / kChunk;
  std::vector<Accumulator> partials(std::size_t(n_chunks), Accumulator(grid.size()));
  std::atomic<int> next_chunk{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      const int chunk = next_chunk.fetch_add(1);
      if (chunk >= n_chunks || failed.load()) break;
      const int begin = chunk * kChunk;
      const int end = std::min(begin + kChunk, config.n_atoms);
      try {
        for (int i = begin; i < end; ++i) {
          propagate_atom(c, numerics::substream_seed(config.seed, std::uint64_t(i)), dt,
                         config.entrance_velocity, config.initial_radius, sigma_v, grid,
                         config.track_energy_drift, partials[std::size_t(chunk)],
                         max_steps);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = e.what();
        failed.store(true);
        break;
      }
    }
  };

  const int n_threads = std::max(1, config.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw NumericsError(failure);

  // deterministic reduction in chunk order
  Accumulator total(grid.size());
  for (const auto& p : partials) total.merge(p);

  McStats stats;
  stats.n_atoms = config.n_atoms;
  stats.time_step = dt;
  stats.records.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    McRecord r;
    r.z = grid[i];
    r.n = total.count[i];
    if (r.n > 0) {
      const double n = double(r.n);
      r.mean_vz = total.sum_vz[i] / n;
      const double var = std::max(0.0, total.sum_vz2[i] / n - r.mean_vz * r.mean_vz);
      r.stderr_vz = std::sqrt(var / n);
      r.t_h = species.mass * (total.sum_vt2[i] / n) / (2.0 * constants::k_boltzmann);
      r.rms_radius = std::sqrt(total.sum_r2[i] / n);
      r.n_captured = total.captured[i];
    }
    stats.records.push_back(r);
  }
  const McRecord& last = stats.records.back();
  stats.mean_v_arrival = last.mean_vz;
  stats.stderr_v_arrival = last.stderr_vz;
  stats.stddev_v_arrival = last.stderr_vz * std::sqrt(double(std::max<long>(last.n, 1)));
  stats.n_captured = last.n_captured;
  stats.upper_event_fraction =
      total.events > 0 ? double(total.upper_events) / double(total.events) : 0.0;
  stats.max_energy_drift = total.max_energy_drift;
  return stats;
}

}  // namespace pushguide
