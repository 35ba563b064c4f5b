#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pushguide/config.hpp"
#include "pushguide/units.hpp"

using namespace pushguide;

namespace {

std::string read_config_file(const std::string& name) {
  std::ifstream in(std::string(PUSHGUIDE_CONFIG_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("bundled cesium config carries the reference setup") {
  const RunConfig cfg = parse_config(read_config_file("cs_paper.cfg"));
  CHECK(cfg.species.name == "Cs133");
  CHECK(cfg.geometry.trap_separation == doctest::Approx(0.57).epsilon(1e-12));
  CHECK(cfg.beam.power == doctest::Approx(63e-3).epsilon(1e-12));
  CHECK(cfg.beam.detuning ==
        doctest::Approx(-2.0 * units::gigahertz_angular).epsilon(1e-12));
  CHECK(cfg.beam.waist_min == doctest::Approx(200e-6).epsilon(1e-12));
  CHECK(cfg.beam.focus_position == doctest::Approx(-0.34).epsilon(1e-12));
  CHECK(cfg.beam.rayleigh_length == doctest::Approx(0.110).epsilon(1e-12));
  CHECK(cfg.entrance_temperature == doctest::Approx(25e-6).epsilon(1e-12));
  CHECK(cfg.geometry.mot2_radius == doctest::Approx(4e-3).epsilon(1e-12));
  CHECK(cfg.geometry.mot1_radius == doctest::Approx(10e-3).epsilon(1e-12));
}

TEST_CASE("bundled rubidium config carries the reference setup") {
  const RunConfig cfg = parse_config(read_config_file("rb_paper.cfg"));
  CHECK(cfg.species.name == "Rb87");
  CHECK(cfg.species.delta_hfs_ground ==
        doctest::Approx(6.8 * units::gigahertz_angular).epsilon(1e-12));
  CHECK(cfg.geometry.trap_separation == doctest::Approx(0.72).epsilon(1e-12));
  CHECK(cfg.beam.power == doctest::Approx(21e-3).epsilon(1e-12));
  CHECK(cfg.beam.rayleigh_length == doctest::Approx(0.260).epsilon(1e-12));
  CHECK(cfg.entrance_temperature == doctest::Approx(40e-6).epsilon(1e-12));
}

TEST_CASE("empty document lists the required keys") {
  try {
    parse_config("");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("beam.power_mW") != std::string::npos);
    CHECK(msg.find("geometry.separation_cm") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with their line number") {
  const std::string text =
      "species = Rb87\n"
      "beam.power_mW = 21\n"
      "beam.detuning_GHz = -1\n"
      "beam.waist_um = 300\n"
      "beam.focus_cm = -13\n"
      "geometry.separation_cm = 72\n"
      "geometry.mot2_radius_mm = 4\n"
      "geometry.mot1_radius_mm = 10\n"
      "beam.wobble = 3\n";
  try {
    parse_config(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("beam.wobble") != std::string::npos);
    CHECK(msg.find("line 9") != std::string::npos);
  }
}

TEST_CASE("duplicate keys are rejected") {
  CHECK_THROWS_AS(parse_config("species = Rb87\nspecies = Cs133\n"), ConfigError);
}

TEST_CASE("custom species") {
  const std::string base =
      "beam.power_mW = 21\n"
      "beam.detuning_GHz = -1\n"
      "beam.waist_um = 300\n"
      "beam.focus_cm = -13\n"
      "geometry.separation_cm = 72\n"
      "geometry.mot2_radius_mm = 4\n"
      "geometry.mot1_radius_mm = 10\n"
      "transport.t0_uK = 40\n";

  SUBCASE("full block parses") {
    const std::string text =
        "species.name = Na23\n"
        "species.gamma = 9.79 MHz\n"
        "species.wavelength = 589.16 nm\n"
        "species.mass = 22.989769 u\n"
        "species.hfs_ground = 1.77 GHz\n"
        "species.hfs_excited = 100 MHz\n"
        "species.f_lower = 1\n" +
        base;
    const RunConfig cfg = parse_config(text);
    CHECK(cfg.species.name == "Na23");
    CHECK(cfg.species.gamma ==
          doctest::Approx(9.79 * units::megahertz_angular).epsilon(1e-12));
    CHECK(cfg.species.mass ==
          doctest::Approx(22.989769 * constants::atomic_mass_unit).epsilon(1e-12));
  }

  SUBCASE("negative linewidth rejected") {
    const std::string text =
        "species.name = Bad\n"
        "species.gamma = -1 MHz\n"
        "species.wavelength = 589.16 nm\n"
        "species.mass = 22.989769 u\n"
        "species.hfs_ground = 1.77 GHz\n"
        "species.hfs_excited = 100 MHz\n"
        "species.f_lower = 1\n" +
        base;
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }

  SUBCASE("missing unit tag rejected") {
    const std::string text =
        "species.name = Bad\n"
        "species.gamma = 9.79\n"
        "species.wavelength = 589.16 nm\n"
        "species.mass = 22.989769 u\n"
        "species.hfs_ground = 1.77 GHz\n"
        "species.hfs_excited = 100 MHz\n"
        "species.f_lower = 1\n" +
        base;
    try {
      parse_config(text);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("unit") != std::string::npos);
    }
  }

  SUBCASE("unknown species name rejected") {
    CHECK_THROWS_AS(parse_config("species = Xe999\n" + base), ConfigError);
  }

  SUBCASE("custom species requires an explicit entrance temperature") {
    const std::string text =
        "species.name = Na23\n"
        "species.gamma = 9.79 MHz\n"
        "species.wavelength = 589.16 nm\n"
        "species.mass = 22.989769 u\n"
        "species.hfs_ground = 1.77 GHz\n"
        "species.hfs_excited = 100 MHz\n"
        "species.f_lower = 1\n"
        "beam.power_mW = 21\n"
        "beam.detuning_GHz = -1\n"
        "beam.waist_um = 300\n"
        "beam.focus_cm = -13\n"
        "geometry.separation_cm = 72\n"
        "geometry.mot2_radius_mm = 4\n"
        "geometry.mot1_radius_mm = 10\n";
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
}

TEST_CASE("command-line overrides replace file values") {
  ConfigDocument doc = parse_document(read_config_file("rb_paper.cfg"));
  apply_override(doc, "beam.power_mW=10");
  apply_override(doc, "mc.seed=42");
  const RunConfig cfg = parse_config(doc);
  CHECK(cfg.beam.power == doctest::Approx(10e-3).epsilon(1e-12));
  CHECK(cfg.mc.seed == 42);

  CHECK_THROWS_AS(apply_override(doc, "oops"), ConfigError);
}

TEST_CASE("parameter application keeps the beam consistent") {
  RunConfig cfg = parse_config(read_config_file("rb_paper.cfg"));

  SUBCASE("detuning and power in user units") {
    apply_parameter(cfg, "beam.detuning_GHz", -1.5);
    CHECK(cfg.beam.detuning ==
          doctest::Approx(-1.5 * units::gigahertz_angular).epsilon(1e-12));
    apply_parameter(cfg, "beam.power_mW", 10.0);
    CHECK(cfg.beam.power == doctest::Approx(10e-3).epsilon(1e-12));
  }

  SUBCASE("sweeping the waist against a pinned Rayleigh length can reject") {
    CHECK_THROWS_AS(apply_parameter(cfg, "beam.waist_um", 20.0), ConfigError);
  }

  SUBCASE("with a derived Rayleigh length the waist stays consistent") {
    cfg.rayleigh_supplied = false;
    apply_parameter(cfg, "beam.waist_um", 200.0);
    CHECK(cfg.beam.rayleigh_length ==
          doctest::Approx(ideal_rayleigh_length(200e-6, cfg.species.wavelength))
              .epsilon(1e-12));
  }

  SUBCASE("unknown path rejected") {
    CHECK_THROWS_AS(apply_parameter(cfg, "beam.nonsense", 1.0), ConfigError);
  }
}

TEST_CASE("sweep and optimize blocks parse") {
  const std::string text = std::string(
      "species = Rb87\n"
      "beam.power_mW = 21\n"
      "beam.detuning_GHz = -1\n"
      "beam.waist_um = 300\n"
      "beam.focus_cm = -13\n"
      "beam.rayleigh_mm = 260\n"
      "geometry.separation_cm = 72\n"
      "geometry.mot2_radius_mm = 4\n"
      "geometry.mot1_radius_mm = 10\n"
      "sweep.objective = refined_score\n"
      "sweep.axis1 = beam.detuning_GHz\n"
      "sweep.axis1_min = -2.5\n"
      "sweep.axis1_max = -0.2\n"
      "sweep.axis1_steps = 24\n"
      "optimize.param1 = beam.detuning_GHz\n"
      "optimize.param1_min = -2.5\n"
      "optimize.param1_max = -0.2\n");
  const RunConfig cfg = parse_config(text);
  REQUIRE(cfg.sweep.has_value());
  CHECK(cfg.sweep->axes.size() == 1);
  CHECK(cfg.sweep->axes[0].values.size() == 24);
  CHECK(cfg.sweep->axes[0].values.front() == doctest::Approx(-2.5));
  CHECK(cfg.sweep->axes[0].values.back() == doctest::Approx(-0.2));
  REQUIRE(cfg.optimize.has_value());
  CHECK(cfg.optimize->parameters[0] == "beam.detuning_GHz");

  SUBCASE("bad objective rejected") {
    CHECK_THROWS_AS(parse_config(text + "sweep.objective2 = x\n"), ConfigError);
  }
}

TEST_CASE("rates block") {
  const std::string text =
      "species = Cs133\n"
      "beam.power_mW = 63\n"
      "beam.detuning_GHz = -2\n"
      "beam.waist_um = 200\n"
      "beam.focus_cm = -34\n"
      "beam.rayleigh_mm = 110\n"
      "geometry.separation_cm = 57\n"
      "geometry.mot2_radius_mm = 4\n"
      "geometry.mot1_radius_mm = 10\n"
      "rates.L1 = 3.9e8\n"
      "rates.tau_s = 2\n"
      "rates.N1_push = 1e8\n"
      "rates.L2 = 2.7e8\n";
  const RunConfig cfg = parse_config(text);
  REQUIRE(cfg.rates.has_value());
  CHECK(cfg.rates->background_loss == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cfg.rates->loading_rate_1 == doctest::Approx(3.9e8).epsilon(1e-12));
}

TEST_CASE("config echo is stable and complete") {
  const RunConfig cfg = parse_config(read_config_file("rb_paper.cfg"));
  const auto echo = cfg.echo();
  const auto echo2 = cfg.echo();
  CHECK(echo == echo2);
  bool found = false;
  for (const auto& [k, v] : echo)
    if (k == "beam.power_mW" && v == "21") found = true;
  CHECK(found);
}
