#pragma once

// Reference setups compiled into the CLI so `figures` works without external
// files.  The same text lives in configs/*.cfg; a unit test keeps them in sync.

namespace pushguide::bundled {

inline constexpr const char* cs_paper = R"(# Cesium pushing-guiding setup: 57 cm drop between the traps,
# beam focused 34 cm above the upper trap by an f = 2 m lens.
species = Cs133

beam.power_mW = 63
beam.detuning_GHz = -2
beam.waist_um = 200
beam.focus_cm = -34
beam.rayleigh_mm = 110

geometry.separation_cm = 57
geometry.mot2_radius_mm = 4
geometry.mot1_radius_mm = 10

transport.t0_uK = 25

mc.n_atoms = 10000
mc.seed = 1
)";

inline constexpr const char* rb_paper = R"(# Rubidium pushing-guiding setup: 72 cm drop between the traps,
# beam focused 13 cm above the upper trap by an f = 1 m lens.
species = Rb87

beam.power_mW = 21
beam.detuning_GHz = -1
beam.waist_um = 300
beam.focus_cm = -13
beam.rayleigh_mm = 260

geometry.separation_cm = 72
geometry.mot2_radius_mm = 4
geometry.mot1_radius_mm = 10

transport.t0_uK = 40

mc.n_atoms = 10000
mc.seed = 1
)";

}  // namespace pushguide::bundled
