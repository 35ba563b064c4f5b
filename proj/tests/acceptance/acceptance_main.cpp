// Acceptance suite: checks the model outputs for the two bundled setups
// against their reference values at fixed tolerances, plus the property and
// determinism requirements.  One PASS/FAIL line per check; exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pushguide/config.hpp"
#include "pushguide/monte_carlo.hpp"
#include "pushguide/mot_rates.hpp"
#include "pushguide/report.hpp"
#include "pushguide/sweep.hpp"
#include "pushguide/transport.hpp"
#include "pushguide/units.hpp"

namespace fs = std::filesystem;
using namespace pushguide;

namespace {

struct Checker {
  int passed = 0;
  int failed = 0;

  void check(const std::string& id, bool ok, const std::string& detail) {
    std::printf("[%s] %-8s %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    ok ? ++passed : ++failed;
  }

  /// |value - target| <= frac * |target|
  void within(const std::string& id, double value, double target, double frac,
              const std::string& what) {
    const bool ok = std::abs(value - target) <= frac * std::abs(target);
    std::ostringstream os;
    os << what << ": " << value << " vs " << target << " +-" << frac * 100 << "%";
    check(id, ok, os.str());
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load(const std::string& name) {
  return parse_config(slurp(fs::path(PUSHGUIDE_CONFIG_DIR) / name));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  Checker c;
  const auto wall0 = std::chrono::steady_clock::now();

  const RunConfig cs_cfg = load("cs_paper.cfg");
  const RunConfig rb_cfg = load("rb_paper.cfg");
  const TransportModel cs(cs_cfg.species, cs_cfg.beam, cs_cfg.geometry,
                          cs_cfg.entrance_temperature, cs_cfg.model);
  const TransportModel rb(rb_cfg.species, rb_cfg.beam, rb_cfg.geometry,
                          rb_cfg.entrance_temperature, rb_cfg.model);
  const double cs_D = cs_cfg.geometry.trap_separation;
  const double rb_D = rb_cfg.geometry.trap_separation;

  // 1. optical pumping fractions, +-0.3 percentage points
  {
    const double eta_cs = cs.pumping().eta * 100.0;
    const double eta_rb = rb.pumping().eta * 100.0;
    c.check("1a", std::abs(eta_cs - 3.2) <= 0.3,
            "eta(Cs, -2 GHz) = " + std::to_string(eta_cs) + " % vs 3.2 +- 0.3");
    c.check("1b", std::abs(eta_rb - 1.6) <= 0.3,
            "eta(Rb, -1 GHz) = " + std::to_string(eta_rb) + " % vs 1.6 +- 0.3");
  }

  // 2. capture velocities at R = 4 mm, +-5%
  c.within("2a", capture_velocity(cs_cfg.species, cs_cfg.geometry), 21.0, 0.05,
           "v_capture(Cs) m/s");
  c.within("2b", capture_velocity(rb_cfg.species, rb_cfg.geometry), 30.0, 0.05,
           "v_capture(Rb) m/s");

  // 3. entrance velocities
  c.within("3a", rb.entrance_velocity(), 9.0, 0.10, "v0(Rb, 21 mW) m/s");
  c.within("3b", cs.entrance_velocity(), 3.1, 0.15, "v0(Cs, 63 mW) m/s");

  // 4. arrival velocities
  c.within("4a", rb.velocity(rb_D), 12.6, 0.05, "v(D)(Rb, 21 mW) m/s");
  c.within("4b", cs.velocity(cs_D), 5.5, 0.15, "v(D)(Cs, 63 mW) m/s");

  // 5. travel time: Cs value and the monotone Rb power curve
  {
    const auto t0 = std::chrono::steady_clock::now();
    c.within("5a", cs.travel_time() * 1e3, 130.0, 0.20, "dt(Cs, 63 mW) ms");
    bool monotone = true;
    double prev = 1e99;
    for (double p = 5.0; p <= 21.0 + 1e-9; p += 2.0) {
      RunConfig cfg = rb_cfg;
      apply_parameter(cfg, "beam.power_mW", p);
      const double t = make_model(cfg).travel_time();
      if (t >= prev) monotone = false;
      prev = t;
    }
    std::ostringstream os;
    os << "dt(Rb) strictly decreasing over 5-21 mW (" << seconds_since(t0) << " s)";
    c.check("5b", monotone, os.str());
  }

  // 6. guide exit heights, +-10%
  {
    const double z_rb = rb.guide_exit() ? *rb.guide_exit() * 100.0 : -1.0;
    const double z_cs = cs.guide_exit() ? *cs.guide_exit() * 100.0 : -1.0;
    c.within("6a", z_rb, 28.5, 0.10, "z_out(Rb, 21 mW, T0=40 uK) cm");
    c.within("6b", z_cs, 38.0, 0.10, "z_out(Cs, 63 mW, T0=25 uK) cm");
  }

  // 7. cloud sizes and the Rb post-exit fall time
  {
    c.within("7a", rb.delta_r_out() * 1e6, 200.0, 0.10, "dr_out(Rb) um");
    c.within("7b", cs.delta_r_out() * 1e6, 470.0, 0.10, "dr_out(Cs) um");
    c.within("7c", rb.cloud_radius(rb_D) * 1e3, 1.75, 0.15, "dr_arrival(Rb) mm");
    c.within("7d", cs.cloud_radius(cs_D) * 1e3, 1.0, 0.15, "dr_arrival(Cs) mm");
    const double fall = (rb.travel_time() - rb.time_to(*rb.guide_exit())) * 1e3;
    c.within("7e", fall, 36.0, 0.10, "post-exit fall time (Rb) ms");
  }

  // 8. exit temperatures, +-20%
  c.within("8a", rb.exit_temperature() * 1e6, 25.0, 0.20, "T_h(z_out)(Rb) uK");
  c.within("8b", cs.exit_temperature() * 1e6, 10.0, 0.20, "T_h(z_out)(Cs) uK");

  // 9. refined-efficiency detuning windows (200-point sweeps)
  {
    const auto t0 = std::chrono::steady_clock::now();
    auto window = [&](double power_mw, double& lo, double& hi) {
      RunConfig cfg = rb_cfg;
      apply_parameter(cfg, "beam.power_mW", power_mw);
      SweepSpec spec;
      spec.objective = "refined_score";
      SweepAxis axis;
      axis.parameter = "beam.detuning_GHz";
      for (int i = 0; i < 200; ++i)
        axis.values.push_back(-2.5 + (2.5 - 0.2) * i / 199.0);
      spec.axes.push_back(axis);
      const SweepTable table = run_sweep(spec, cfg, 2);
      lo = 0.0;
      hi = 0.0;
      bool any = false;
      for (const auto& row : table.rows) {
        if (row.error.empty() && row.objective > 0.5) {
          if (!any) lo = row.coords[0];
          hi = row.coords[0];
          any = true;
        }
      }
      return table;
    };
    double lo21, hi21, lo10, hi10;
    const SweepTable t21 = window(21.0, lo21, hi21);
    window(10.0, lo10, hi10);

    bool contains = true;
    bool contained = true;
    for (const auto& row : t21.rows) {
      const double d = row.coords[0];
      const double score = row.error.empty() ? row.objective : 0.0;
      if (d >= -1.5 && d <= -0.6 && !(score > 0.5)) contains = false;
      if ((d < -2.0 || d > -0.3) && score > 0.5) contained = false;
    }
    std::ostringstream os;
    os << "21 mW window [" << lo21 << ", " << hi21 << "] GHz contains [-1.5, -0.6]";
    c.check("9a", contains, os.str());
    os.str("");
    os << "21 mW window [" << lo21 << ", " << hi21 << "] GHz inside [-2.0, -0.3]";
    c.check("9b", contained, os.str());
    os.str("");
    os << "10 mW window width " << hi10 - lo10 << " < 21 mW width " << hi21 - lo21
       << " GHz (" << seconds_since(t0) << " s)";
    c.check("9c", (hi10 - lo10) < (hi21 - lo21), os.str());
  }

  // 10. two-level peak ratio 46 mW vs 10 mW within a factor 3 of 1000
  {
    const auto t0 = std::chrono::steady_clock::now();
    double peak46 = 0.0, peak10 = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double det = -8.0 + (8.0 - 0.2) * i / 199.0;
      RunConfig cfg = cs_cfg;
      apply_parameter(cfg, "beam.detuning_GHz", det);
      apply_parameter(cfg, "beam.power_mW", 46.0);
      peak46 = std::max(peak46, two_level_efficiency(cfg.species, cfg.beam,
                                                     cfg.geometry));
      apply_parameter(cfg, "beam.power_mW", 10.0);
      peak10 = std::max(peak10, two_level_efficiency(cfg.species, cfg.beam,
                                                     cfg.geometry));
    }
    const double ratio = peak46 / peak10;
    std::ostringstream os;
    os << "two-level peak ratio 46/10 mW = " << ratio << " vs 1000 within x3 ("
       << seconds_since(t0) << " s)";
    c.check("10", ratio >= 1000.0 / 3.0 && ratio <= 3000.0, os.str());
  }

  // 11. property suite
  {
    const auto t0 = std::chrono::steady_clock::now();

    // a) closed-form temperature vs direct rate-equation integration
    double worst = 0.0;
    for (const TransportModel* m : {&rb, &cs}) {
      const double D = m->geometry().trap_separation;
      std::vector<double> zs;
      for (int i = 1; i <= 1000; ++i) zs.push_back(D * i / 1000.0);
      const auto ode = m->horizontal_temperature_ode(zs);
      for (std::size_t i = 0; i < zs.size(); ++i)
        worst = std::max(worst, std::abs(ode[i] - m->horizontal_temperature(zs[i])) /
                                    m->horizontal_temperature(zs[i]));
    }
    c.check("11a", worst < 1e-6,
            "temperature ODE vs closed form, worst rel err = " + std::to_string(worst));

    // b) energy bookkeeping between the velocity profile and pushing potential
    double worst_e = 0.0;
    for (const TransportModel* m : {&rb, &cs}) {
      const double mass = m->species().mass;
      const double g = m->geometry().gravity;
      const double v0 = m->entrance_velocity();
      for (double f = 0.1; f <= 1.0; f += 0.1) {
        const double z = f * m->geometry().trap_separation;
        const double v = m->velocity(z);
        const double lhs = 0.5 * mass * (v * v - v0 * v0) - mass * g * z;
        const double rhs = m->pushing_potential_at(0.0) - m->pushing_potential_at(z);
        worst_e = std::max(worst_e, std::abs(lhs - rhs) / std::abs(rhs));
      }
    }
    c.check("11b", worst_e < 1e-10,
            "energy conservation, worst rel err = " + std::to_string(worst_e));

    // c) adiabatic invariant with the heating switched off
    {
      ModelOptions opts = rb_cfg.model;
      opts.disable_heating = true;
      TransportModel frozen(rb_cfg.species, rb_cfg.beam, rb_cfg.geometry,
                            rb_cfg.entrance_temperature, opts);
      double dev = 0.0;
      const double ref = frozen.horizontal_temperature(0.0) *
                         std::pow(waist_at(rb_cfg.beam, 0.0), 2);
      for (double f = 0.1; f <= 1.0; f += 0.1) {
        const double z = f * rb_D;
        const double tw2 =
            frozen.horizontal_temperature(z) * std::pow(waist_at(rb_cfg.beam, z), 2);
        dev = std::max(dev, std::abs(tw2 - ref) / ref);
      }
      c.check("11c", dev < 1e-12,
              "adiabatic invariant T w^2, worst rel dev = " + std::to_string(dev));
    }

    // d) cloud-radius continuity at the exit
    {
      const double z_out = *rb.guide_exit();
      const double jump =
          std::abs(rb.cloud_radius(z_out - 1e-9) - rb.cloud_radius(z_out + 1e-9));
      c.check("11d", jump < 1e-8 * rb.delta_r_out(),
              "cloud radius continuous at z_out, jump = " + std::to_string(jump));
    }

    // e) conditional score anchor points
    c.check("11e", conditional_score(0.0) == 1.0 && conditional_score(1.0) == 0.5,
            "f(0) = 1 and f(1) = 0.5");

    std::ostringstream os;
    os << "properties a-e took " << seconds_since(t0) << " s";
    c.check("11t", seconds_since(t0) < 60.0, os.str());
  }

  // 11f/g. Monte Carlo against the averaged model (1e4 atoms, fixed seed)
  {
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto* pair : {&rb_cfg, &cs_cfg}) {
      const RunConfig& cfg = *pair;
      const TransportModel& model = (pair == &rb_cfg) ? rb : cs;
      const std::string tag = cfg.species.name == "Rb87" ? "Rb" : "Cs";
      McConfig mc = cfg.mc;
      mc.entrance_velocity = model.entrance_velocity();
      mc.threads = 2;
      const McStats stats = run_ensemble(mc, cfg.beam, cfg.species, model.pumping(),
                                         cfg.geometry, cfg.model.bracket);
      const double v_model = model.velocity(cfg.geometry.trap_separation);
      const double dev = std::abs(stats.mean_v_arrival - v_model);
      std::ostringstream os;
      os << tag << " mean v(D) MC " << stats.mean_v_arrival << " vs model " << v_model
         << ", |diff| = " << dev << ", 2 SE = " << 2.0 * stats.stderr_v_arrival
         << " (sample sd " << stats.stddev_v_arrival << ")";
      c.check(std::string("11f-") + tag, dev <= 2.0 * stats.stderr_v_arrival, os.str());

      // guided-phase temperature within 15% of the closed form
      const double z_out = model.guide_exit() ? *model.guide_exit()
                                              : cfg.geometry.trap_separation;
      double worst_t = 0.0;
      for (const auto& rec : stats.records) {
        if (rec.z <= 0.0 || rec.z > z_out) continue;
        const double ana = model.horizontal_temperature(rec.z);
        worst_t = std::max(worst_t, std::abs(rec.t_h - ana) / ana);
      }
      os.str("");
      os << tag << " guided-phase T_h vs closed form, worst rel dev = " << worst_t;
      c.check(std::string("11g-") + tag, worst_t < 0.15, os.str());
    }
    std::ostringstream os;
    os << "Monte Carlo checks took " << seconds_since(t0) << " s";
    c.check("11u", seconds_since(t0) < 60.0, os.str());
  }

  // mot_rates bookkeeping with the quoted fluxes (exact arithmetic)
  {
    const double eff_cs = transfer_efficiency(2.7e8, 2.7e8 / 0.70).value;
    const double eff_rb = transfer_efficiency(1.0e8, 1.0e8 / 0.50).value;
    c.check("rates", std::abs(eff_cs - 0.70) < 1e-12 && std::abs(eff_rb - 0.50) < 1e-12,
            "transfer_efficiency reproduces 0.70 (Cs) and 0.50 (Rb) exactly");
  }

  // 12. byte-identical repeated CLI runs, any thread count
  {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path dir = fs::path("acceptance_tmp");
    fs::remove_all(dir);
    fs::create_directories(dir / "a");
    fs::create_directories(dir / "b");
    const std::string cli = PUSHGUIDE_CLI;
    const std::string cfg = (fs::path(PUSHGUIDE_CONFIG_DIR) / "rb_paper.cfg").string();

    auto run = [&](const std::string& args, const fs::path& stdout_to) {
      const std::string cmd = cli + " " + args + " > " + stdout_to.string() + " 2>&1";
      return std::system(cmd.c_str()) == 0;
    };

    bool ok = run("simulate --config " + cfg + " --json --out " + (dir / "a").string(),
                  dir / "a" / "stdout.json") &&
              run("simulate --config " + cfg + " --json --out " + (dir / "b").string(),
                  dir / "b" / "stdout.json");
    ok = ok && slurp(dir / "a" / "stdout.json") == slurp(dir / "b" / "stdout.json") &&
         !slurp(dir / "a" / "stdout.json").empty();
    ok = ok && slurp(dir / "a" / "profile.csv") == slurp(dir / "b" / "profile.csv");
    c.check("12a", ok, "simulate --json twice: stdout and profile.csv byte-identical");

    bool ok_mc =
        run("mc --config " + cfg + " --set mc.n_atoms=2000 --threads 1 --out " +
                (dir / "a").string(),
            dir / "a" / "mc_stdout.txt") &&
        run("mc --config " + cfg + " --set mc.n_atoms=2000 --threads 2 --out " +
                (dir / "b").string(),
            dir / "b" / "mc_stdout.txt");
    ok_mc = ok_mc &&
            slurp(dir / "a" / "mc_profile.csv") == slurp(dir / "b" / "mc_profile.csv") &&
            !slurp(dir / "a" / "mc_profile.csv").empty();
    std::ostringstream os;
    os << "mc with 1 vs 2 threads: mc_profile.csv byte-identical ("
       << seconds_since(t0) << " s)";
    c.check("12b", ok_mc, os.str());
    fs::remove_all(dir);
  }

  std::printf("----\n%d passed, %d failed, total wall time %.1f s\n", c.passed, c.failed,
              seconds_since(wall0));
  return c.failed;
}
