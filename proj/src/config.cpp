#include "pushguide/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "pushguide/units.hpp"

namespace pushguide {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& key, int line) {
  const std::string t = trim(text);
  double value = 0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("config line " + std::to_string(line) + ": '" + key +
                      "' expects a number, got '" + text + "'");
  return value;
}

// Splits "5.9 MHz" into the numeric part and the unit tag.
std::pair<double, std::string> parse_quantity(const std::string& text,
                                              const std::string& key, int line) {
  const std::string t = trim(text);
  const auto space = t.find_first_of(" \t");
  if (space == std::string::npos)
    throw ConfigError("config line " + std::to_string(line) + ": '" + key +
                      "' requires a unit tag (e.g. '5.9 MHz')");
  const std::string num = trim(t.substr(0, space));
  const std::string unit = trim(t.substr(space + 1));
  return {parse_number(num, key, line), unit};
}

double angular_frequency_from(const std::string& unit, double value,
                              const std::string& key, int line) {
  if (unit == "Hz") return value * units::hertz_angular;
  if (unit == "kHz") return value * units::kilohertz_angular;
  if (unit == "MHz") return value * units::megahertz_angular;
  if (unit == "GHz") return value * units::gigahertz_angular;
  throw ConfigError("config line " + std::to_string(line) + ": '" + key +
                    "' has unknown frequency unit '" + unit + "'");
}

double length_from(const std::string& unit, double value, const std::string& key,
                   int line) {
  if (unit == "nm") return value * units::nanometre;
  if (unit == "um") return value * units::micrometre;
  if (unit == "mm") return value * units::millimetre;
  if (unit == "cm") return value * units::centimetre;
  if (unit == "m") return value;
  throw ConfigError("config line " + std::to_string(line) + ": '" + key +
                    "' has unknown length unit '" + unit + "'");
}

double mass_from(const std::string& unit, double value, const std::string& key,
                 int line) {
  if (unit == "kg") return value;
  if (unit == "u") return value * constants::atomic_mass_unit;
  throw ConfigError("config line " + std::to_string(line) + ": '" + key +
                    "' has unknown mass unit '" + unit + "'");
}

std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Tracks which keys were consumed so leftovers can be rejected.
class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {
    for (const auto& e : doc.entries) {
      if (index_.count(e.key))
        throw ConfigError("config line " + std::to_string(e.line) + ": duplicate key '" +
                          e.key + "'");
      index_[e.key] = &e;
    }
  }

  bool has(const std::string& key) const { return index_.count(key) > 0; }

  const ConfigEntry* take(const std::string& key) {
    auto it = index_.find(key);
    if (it == index_.end()) return nullptr;
    consumed_.insert(key);
    return it->second;
  }

  double number(const std::string& key) {
    const auto* e = take(key);
    if (!e) throw ConfigError("config: missing required key '" + key + "'");
    return parse_number(e->value, key, e->line);
  }

  double number_or(const std::string& key, double fallback) {
    const auto* e = take(key);
    return e ? parse_number(e->value, key, e->line) : fallback;
  }

  long integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v))
      throw ConfigError("config: '" + key + "' must be an integer");
    return long(v);
  }

  long integer_or(const std::string& key, long fallback) {
    return has(key) ? integer(key) : fallback;
  }

  std::string text(const std::string& key) {
    const auto* e = take(key);
    if (!e) throw ConfigError("config: missing required key '" + key + "'");
    return trim(e->value);
  }

  std::string text_or(const std::string& key, const std::string& fallback) {
    const auto* e = take(key);
    return e ? trim(e->value) : fallback;
  }

  void reject_unknown() const {
    std::string complaint;
    for (const auto& e : doc_.entries) {
      if (!consumed_.count(e.key)) {
        if (!complaint.empty()) complaint += "; ";
        complaint += "'" + e.key + "' (line " + std::to_string(e.line) + ")";
      }
    }
    if (!complaint.empty()) throw ConfigError("config: unknown keys: " + complaint);
  }

 private:
  const ConfigDocument& doc_;
  std::map<std::string, const ConfigEntry*> index_;
  std::set<std::string> consumed_;
};

const char* kRequiredKeys =
    "species (or a species.* block), beam.power_mW, beam.detuning_GHz, beam.waist_um, "
    "beam.focus_cm, geometry.separation_cm, geometry.mot2_radius_mm, "
    "geometry.mot1_radius_mm";

SpeciesParams species_from(Reader& r) {
  const std::string choice = r.text_or("species", "custom");
  if (choice == "Cs133") return cesium133();
  if (choice == "Rb87") return rubidium87();
  if (choice != "custom")
    throw ConfigError("config: unknown species '" + choice +
                      "' (built-ins: Cs133, Rb87; otherwise supply a species.* block)");

  SpeciesParams sp;
  sp.name = r.text_or("species.name", "custom");
  auto quantity = [&](const char* key) {
    const auto* e = r.take(key);
    if (!e) throw ConfigError(std::string("config: custom species needs '") + key + "'");
    return parse_quantity(e->value, key, e->line);
  };
  {
    const auto [v, u] = quantity("species.gamma");
    sp.gamma = angular_frequency_from(u, v, "species.gamma", 0);
  }
  {
    const auto [v, u] = quantity("species.wavelength");
    sp.wavelength = length_from(u, v, "species.wavelength", 0);
  }
  {
    const auto [v, u] = quantity("species.mass");
    sp.mass = mass_from(u, v, "species.mass", 0);
  }
  {
    const auto [v, u] = quantity("species.hfs_ground");
    sp.delta_hfs_ground = angular_frequency_from(u, v, "species.hfs_ground", 0);
  }
  {
    const auto [v, u] = quantity("species.hfs_excited");
    sp.delta_hfs_excited = angular_frequency_from(u, v, "species.hfs_excited", 0);
  }
  sp.f_lower = int(r.integer("species.f_lower"));
  validate(sp);
  return sp;
}

SweepSpec sweep_from(Reader& r) {
  SweepSpec spec;
  spec.objective = r.text_or("sweep.objective", "refined_score");
  if (!is_objective(spec.objective))
    throw ConfigError("config: unknown sweep objective '" + spec.objective + "'");
  for (int i = 1; i <= 3; ++i) {
    const std::string base = "sweep.axis" + std::to_string(i);
    if (!r.has(base)) break;
    SweepAxis axis;
    axis.parameter = r.text(base);
    if (!is_sweepable_parameter(axis.parameter))
      throw ConfigError("config: '" + base + "' names unknown parameter '" +
                        axis.parameter + "'");
    if (r.has(base + "_values")) {
      std::stringstream ss(r.text(base + "_values"));
      std::string tok;
      while (std::getline(ss, tok, ','))
        axis.values.push_back(parse_number(tok, base + "_values", 0));
      if (axis.values.empty())
        throw ConfigError("config: '" + base + "_values' is empty");
    } else {
      const double lo = r.number(base + "_min");
      const double hi = r.number(base + "_max");
      const long steps = r.integer(base + "_steps");
      if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw ConfigError("config: '" + base + "' needs finite bounds with min < max");
      if (steps < 2) throw ConfigError("config: '" + base + "_steps' must be >= 2");
      axis.values.resize(std::size_t(steps));
      for (long k = 0; k < steps; ++k)
        axis.values[std::size_t(k)] = lo + (hi - lo) * double(k) / double(steps - 1);
    }
    spec.axes.push_back(std::move(axis));
  }
  if (spec.axes.empty())
    throw ConfigError("config: sweep requires at least sweep.axis1");
  return spec;
}

OptimizeSpec optimize_from(Reader& r) {
  OptimizeSpec spec;
  spec.objective = r.text_or("optimize.objective", "refined_score");
  if (!is_objective(spec.objective))
    throw ConfigError("config: unknown optimize objective '" + spec.objective + "'");
  spec.max_evals = int(r.integer_or("optimize.max_evals", 500));
  spec.tolerance = r.number_or("optimize.tolerance", 1e-4);
  if (spec.max_evals < 1) throw ConfigError("config: optimize.max_evals must be >= 1");
  if (spec.tolerance <= 0) throw ConfigError("config: optimize.tolerance must be > 0");
  static const std::set<std::string> allowed = {
      "beam.detuning_GHz", "beam.power_mW", "beam.waist_um", "beam.focus_cm"};
  for (int i = 1; i <= 4; ++i) {
    const std::string base = "optimize.param" + std::to_string(i);
    if (!r.has(base)) break;
    const std::string path = r.text(base);
    if (!allowed.count(path))
      throw ConfigError("config: '" + base + "': optimizable parameters are "
                        "beam.detuning_GHz, beam.power_mW, beam.waist_um, beam.focus_cm");
    const double lo = r.number(base + "_min");
    const double hi = r.number(base + "_max");
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi))
      throw ConfigError("config: '" + base + "' needs finite bounds with min <= max");
    if (path == "beam.power_mW" && lo < 0)
      throw ConfigError("config: '" + base + "': power bound must be >= 0");
    if (path == "beam.detuning_GHz" && hi >= 0)
      throw ConfigError("config: '" + base + "': detuning bounds must stay red (< 0)");
    if (path == "beam.waist_um" && lo <= 0)
      throw ConfigError("config: '" + base + "': waist bound must be > 0");
    spec.parameters.push_back(path);
    spec.bounds.emplace_back(lo, hi);
  }
  if (spec.parameters.empty())
    throw ConfigError("config: optimize requires at least optimize.param1");
  return spec;
}

}  // namespace

const ConfigEntry* ConfigDocument::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

void ConfigDocument::set(const std::string& key, const std::string& value) {
  for (auto& e : entries) {
    if (e.key == key) {
      e.value = value;
      e.line = 0;
      return;
    }
  }
  entries.push_back({0, key, value});
}

ConfigDocument parse_document(const std::string& text) {
  ConfigDocument doc;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string stripped = trim(raw);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line) +
                        ": expected 'key = value'");
    doc.entries.push_back({line, key, value});
  }
  return doc;
}

void apply_override(ConfigDocument& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty())
    throw ConfigError("override '" + assignment + "': expected key=value");
  doc.set(key, value);
}

SpeciesParams load_species(const ConfigDocument& doc) {
  Reader r(doc);
  auto sp = species_from(r);
  return sp;
}

RunConfig parse_config(const ConfigDocument& doc) {
  if (doc.entries.empty())
    throw ConfigError(std::string("config: empty document; required keys: ") +
                      kRequiredKeys);
  Reader r(doc);
  RunConfig cfg;
  cfg.species = species_from(r);
  validate(cfg.species);

  cfg.beam.power = r.number("beam.power_mW") * units::milliwatt;
  cfg.beam.detuning = r.number("beam.detuning_GHz") * units::gigahertz_angular;
  cfg.beam.waist_min = r.number("beam.waist_um") * units::micrometre;
  cfg.beam.focus_position = r.number("beam.focus_cm") * units::centimetre;
  cfg.rayleigh_supplied = r.has("beam.rayleigh_mm");
  cfg.beam.rayleigh_length = r.number_or("beam.rayleigh_mm", 0.0) * units::millimetre;
  cfg.beam.polarization_factor = r.number_or("beam.polarization_factor", 2.0 / 3.0);
  cfg.beam.transverse_average_factor =
      r.number_or("beam.transverse_average_factor", 0.5);
  finalize(cfg.beam, cfg.species);

  cfg.geometry.trap_separation = r.number("geometry.separation_cm") * units::centimetre;
  cfg.geometry.mot2_radius = r.number("geometry.mot2_radius_mm") * units::millimetre;
  cfg.geometry.mot1_radius = r.number("geometry.mot1_radius_mm") * units::millimetre;
  cfg.geometry.gravity = r.number_or("geometry.gravity", constants::default_gravity);
  validate(cfg.geometry);

  double t0_default = -1.0;
  if (cfg.species.name == "Cs133") t0_default = 25.0;
  if (cfg.species.name == "Rb87") t0_default = 40.0;
  if (r.has("transport.t0_uK")) {
    cfg.entrance_temperature = r.number("transport.t0_uK") * units::microkelvin;
  } else if (t0_default > 0) {
    cfg.entrance_temperature = t0_default * units::microkelvin;
  } else {
    throw ConfigError("config: transport.t0_uK is required for custom species");
  }
  if (cfg.entrance_temperature < 0)
    throw ConfigError("config: transport.t0_uK must be non-negative");

  const std::string bracket = r.text_or("model.bracket", "exact");
  if (bracket == "exact") {
    cfg.model.bracket = PumpingBracket::Exact;
  } else if (bracket == "one_plus_alpha") {
    cfg.model.bracket = PumpingBracket::OnePlusAlpha;
  } else {
    throw ConfigError("config: model.bracket must be 'exact' or 'one_plus_alpha'");
  }
  cfg.model.f_exponent = r.number_or("model.f_exponent", 10.0);
  if (cfg.model.f_exponent <= 0)
    throw ConfigError("config: model.f_exponent must be positive");
  cfg.model.grid_points = int(r.integer_or("model.grid_points", 2000));
  if (cfg.model.grid_points < 16)
    throw ConfigError("config: model.grid_points must be >= 16");

  cfg.mc.n_atoms = int(r.integer_or("mc.n_atoms", 10000));
  cfg.mc.seed = std::uint64_t(r.integer_or("mc.seed", 1));
  cfg.mc.time_step = r.number_or("mc.time_step_us", 0.0) * units::microsecond;
  cfg.mc.initial_radius = r.number_or("mc.initial_radius_um", 100.0) * units::micrometre;
  cfg.mc.initial_temperature =
      r.has("mc.initial_temperature_uK")
          ? r.number("mc.initial_temperature_uK") * units::microkelvin
          : cfg.entrance_temperature;
  const long record_points = r.integer_or("mc.record_points", 101);
  if (record_points < 2) throw ConfigError("config: mc.record_points must be >= 2");
  cfg.mc.record_grid.clear();
  for (long i = 0; i < record_points; ++i)
    cfg.mc.record_grid.push_back(cfg.geometry.trap_separation * double(i) /
                                 double(record_points - 1));
  if (cfg.mc.n_atoms < 1) throw ConfigError("config: mc.n_atoms must be >= 1");

  if (r.has("sweep.axis1") || r.has("sweep.objective")) cfg.sweep = sweep_from(r);
  if (r.has("optimize.param1") || r.has("optimize.objective"))
    cfg.optimize = optimize_from(r);

  if (r.has("rates.L1")) {
    RateInputs rates;
    rates.loading_rate_1 = r.number("rates.L1");
    if (r.has("rates.gamma")) {
      rates.background_loss = r.number("rates.gamma");
      if (r.has("rates.tau_s"))
        throw ConfigError("config: give rates.gamma or rates.tau_s, not both");
    } else {
      const double tau = r.number("rates.tau_s");
      if (tau <= 0) throw ConfigError("config: rates.tau_s must be positive");
      rates.background_loss = 1.0 / tau;
    }
    rates.n1_with_push = r.number("rates.N1_push");
    rates.loading_rate_2 = r.number("rates.L2");
    cfg.rates = rates;
  }

  r.reject_unknown();
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  return parse_config(parse_document(text));
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  auto add = [&out](const std::string& k, const std::string& v) {
    out.emplace_back(k, v);
  };
  auto addn = [&add](const std::string& k, double v) { add(k, format_value(v)); };

  add("species", species.name);
  addn("species.gamma_MHz", species.gamma / units::megahertz_angular);
  addn("species.wavelength_nm", species.wavelength / units::nanometre);
  addn("species.mass_kg", species.mass);
  addn("species.hfs_ground_GHz", species.delta_hfs_ground / units::gigahertz_angular);
  addn("species.hfs_excited_MHz", species.delta_hfs_excited / units::megahertz_angular);
  addn("species.f_lower", species.f_lower);
  addn("beam.power_mW", beam.power / units::milliwatt);
  addn("beam.detuning_GHz", beam.detuning / units::gigahertz_angular);
  addn("beam.waist_um", beam.waist_min / units::micrometre);
  addn("beam.focus_cm", beam.focus_position / units::centimetre);
  addn("beam.rayleigh_mm", beam.rayleigh_length / units::millimetre);
  addn("beam.polarization_factor", beam.polarization_factor);
  addn("beam.transverse_average_factor", beam.transverse_average_factor);
  addn("geometry.separation_cm", geometry.trap_separation / units::centimetre);
  addn("geometry.mot2_radius_mm", geometry.mot2_radius / units::millimetre);
  addn("geometry.mot1_radius_mm", geometry.mot1_radius / units::millimetre);
  addn("geometry.gravity", geometry.gravity);
  addn("transport.t0_uK", entrance_temperature / units::microkelvin);
  add("model.bracket",
      model.bracket == PumpingBracket::Exact ? "exact" : "one_plus_alpha");
  addn("model.f_exponent", model.f_exponent);
  addn("model.grid_points", model.grid_points);
  return out;
}

bool is_sweepable_parameter(const std::string& path) {
  static const std::set<std::string> known = {
      "beam.detuning_GHz", "beam.power_mW",  "beam.waist_um",
      "beam.focus_cm",     "beam.rayleigh_mm", "transport.t0_uK"};
  return known.count(path) > 0;
}

void apply_parameter(RunConfig& cfg, const std::string& path, double value) {
  if (path == "beam.detuning_GHz") {
    cfg.beam.detuning = value * units::gigahertz_angular;
  } else if (path == "beam.power_mW") {
    cfg.beam.power = value * units::milliwatt;
  } else if (path == "beam.waist_um") {
    cfg.beam.waist_min = value * units::micrometre;
    if (!cfg.rayleigh_supplied) cfg.beam.rayleigh_length = 0.0;
    finalize(cfg.beam, cfg.species);
  } else if (path == "beam.focus_cm") {
    cfg.beam.focus_position = value * units::centimetre;
  } else if (path == "beam.rayleigh_mm") {
    cfg.beam.rayleigh_length = value * units::millimetre;
    cfg.rayleigh_supplied = true;
    finalize(cfg.beam, cfg.species);
  } else if (path == "transport.t0_uK") {
    cfg.entrance_temperature = value * units::microkelvin;
  } else {
    throw ConfigError("unknown parameter path '" + path + "'");
  }
}

TransportModel make_model(const RunConfig& cfg) {
  return TransportModel(cfg.species, cfg.beam, cfg.geometry, cfg.entrance_temperature,
                        cfg.model);
}

EfficiencyReport evaluate_report(const RunConfig& cfg) {
  return make_model(cfg).report();
}

bool is_objective(const std::string& name) {
  return name == "two_level_score" || name == "refined_score" || name == "v_arrival" ||
         name == "travel_time" || name == "delta_r_arrival";
}

double objective_value(const EfficiencyReport& r, const std::string& objective) {
  if (objective == "two_level_score") return r.two_level_score;
  if (objective == "refined_score") return r.refined_score;
  if (objective == "v_arrival") return r.v_arrival;
  if (objective == "travel_time") return r.travel_time;
  if (objective == "delta_r_arrival") return r.delta_r_arrival;
  throw ConfigError("unknown objective '" + objective + "'");
}

}  // namespace pushguide
