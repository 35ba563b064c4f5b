#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pushguide/beam.hpp"
#include "pushguide/monte_carlo.hpp"
#include "pushguide/species.hpp"
#include "pushguide/transport.hpp"

namespace pushguide {

/// One `key = value` line of a config document.
struct ConfigEntry {
  int line = 0;  // 0 marks command-line overrides
  std::string key;
  std::string value;
};

struct ConfigDocument {
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(const std::string& key) const;
  /// Override semantics: replaces an existing key or appends a new one.
  void set(const std::string& key, const std::string& value);
};

/// Parses the flat `key = value` format (`#` starts a comment).
ConfigDocument parse_document(const std::string& text);

/// Applies a `key=value` command-line override.
void apply_override(ConfigDocument& doc, const std::string& assignment);

struct SweepAxis {
  std::string parameter;       // e.g. "beam.detuning_GHz", user units
  std::vector<double> values;  // resolved grid
};

struct SweepSpec {
  std::vector<SweepAxis> axes;  // 1 to 3
  std::string objective = "refined_score";
};

struct OptimizeSpec {
  std::vector<std::string> parameters;
  std::vector<std::pair<double, double>> bounds;  // user units
  std::string objective = "refined_score";
  int max_evals = 500;
  double tolerance = 1e-4;
};

struct RateInputs {
  double loading_rate_1 = 0;  // L1, atoms/s
  double background_loss = 0; // gamma, 1/s
  double n1_with_push = 0;    // atoms
  double loading_rate_2 = 0;  // L2, atoms/s
};

/// Fully validated run description: species, beam, geometry, model options,
/// and the optional per-subcommand payloads.
struct RunConfig {
  SpeciesParams species;
  BeamParams beam;
  Geometry geometry;
  double entrance_temperature = 0;  // T0, K
  ModelOptions model;
  bool rayleigh_supplied = false;

  McConfig mc;
  std::optional<SweepSpec> sweep;
  std::optional<OptimizeSpec> optimize;
  std::optional<RateInputs> rates;

  /// Effective configuration echoed into every output header.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

RunConfig parse_config(const ConfigDocument& doc);
RunConfig parse_config(const std::string& text);

/// Species resolution only (built-in name or custom block with unit tags).
SpeciesParams load_species(const ConfigDocument& doc);

/// The parameter paths understood by sweeps and the optimizer.
bool is_sweepable_parameter(const std::string& path);
/// Sets one parameter (user units) on a config, rechecking beam consistency.
void apply_parameter(RunConfig& cfg, const std::string& path, double value);

TransportModel make_model(const RunConfig& cfg);
EfficiencyReport evaluate_report(const RunConfig& cfg);

/// Valid objective names for sweeps and optimization.
bool is_objective(const std::string& name);
double objective_value(const EfficiencyReport& report, const std::string& objective);

}  // namespace pushguide
