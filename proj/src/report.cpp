#include "pushguide/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "pushguide/units.hpp"
#include "pushguide/version.hpp"

namespace pushguide::report {

namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ";";
    out += f;
  }
  return out;
}

std::string sanitize_csv(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

void append_report_columns(std::ostringstream& os, const EfficiencyReport& r) {
  os << ',' << format_double(r.v0) << ',' << format_double(r.v_arrival) << ','
     << format_double(r.travel_time * 1e3) << ','
     << (r.z_out ? format_double(*r.z_out * 1e2) : std::string("none")) << ','
     << format_double(r.delta_r_out * 1e6) << ','
     << format_double(r.delta_r_arrival * 1e3) << ','
     << format_double(r.eta * 1e2) << ',' << format_double(r.two_level_score) << ','
     << format_double(r.refined_score) << ',' << join_flags(r.validity_flags);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string config_header(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# pushguide " << version << "\n";
  for (const auto& [k, v] : cfg.echo()) os << "# " << k << " = " << v << "\n";
  return os.str();
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  for (const auto& [k, v] : cfg.echo()) j[k] = v;
  return j;
}

ordered_json report_json(const RunConfig& cfg, const EfficiencyReport& r) {
  ordered_json j;
  j["tool"] = "pushguide";
  j["version"] = version;
  j["config"] = config_json(cfg);
  ordered_json rep;
  rep["v0"] = r.v0;
  rep["v_arrival"] = r.v_arrival;
  rep["travel_time_ms"] = r.travel_time * 1e3;
  rep["z_out_cm"] = r.z_out ? ordered_json(*r.z_out * 1e2) : ordered_json(nullptr);
  rep["delta_r_out_um"] = number_or_null(r.delta_r_out * 1e6);
  rep["delta_r_arrival_mm"] = number_or_null(r.delta_r_arrival * 1e3);
  rep["t_h_exit_uK"] = r.t_h_exit * 1e6;
  rep["eta_percent"] = r.eta * 1e2;
  rep["two_level_score"] = r.two_level_score;
  rep["refined_score"] = r.refined_score;
  rep["max_adiabaticity"] = r.max_adiabaticity;
  rep["validity_flags"] = r.validity_flags;
  j["report"] = rep;
  return j;
}

std::string report_human(const EfficiencyReport& r) {
  std::ostringstream os;
  os << "entrance velocity      " << format_double(r.v0) << " m/s\n"
     << "arrival velocity       " << format_double(r.v_arrival) << " m/s\n"
     << "travel time            " << format_double(r.travel_time * 1e3) << " ms\n"
     << "guide exit             "
     << (r.z_out ? format_double(*r.z_out * 1e2) + " cm" : std::string("none within D"))
     << "\n"
     << "cloud size at exit     " << format_double(r.delta_r_out * 1e6) << " um\n"
     << "cloud size at arrival  " << format_double(r.delta_r_arrival * 1e3) << " mm\n"
     << "exit temperature       " << format_double(r.t_h_exit * 1e6) << " uK\n"
     << "upper-state fraction   " << format_double(r.eta * 1e2) << " %\n"
     << "two-level score        " << format_double(r.two_level_score) << "\n"
     << "refined score          " << format_double(r.refined_score) << "\n"
     << "max adiabaticity       " << format_double(r.max_adiabaticity) << "\n";
  if (!r.validity_flags.empty()) os << "validity flags         " << join_flags(r.validity_flags) << "\n";
  return os.str();
}

std::string profile_csv(const RunConfig& cfg, const TransportModel& model) {
  const TransportProfile profile = model.profile();
  std::ostringstream os;
  os << config_header(cfg);
  os << "z_m,v_mps,Th_uK,depth_uK,delta_r_mm,guided\n";
  for (const auto& s : profile.samples) {
    const double depth_uK =
        std::abs(model.guide_depth_at(s.z)) / constants::k_boltzmann * 1e6;
    os << format_double(s.z) << ',' << format_double(s.v) << ','
       << format_double(s.t_h * 1e6) << ',' << format_double(depth_uK) << ','
       << format_double(s.delta_r * 1e3) << ',' << (s.guided ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string mc_csv(const RunConfig& cfg, const TransportModel& model,
                   const McStats& stats) {
  std::ostringstream os;
  os << config_header(cfg);
  os << "# mc.n_atoms = " << stats.n_atoms << "\n";
  os << "# mc.time_step_us = " << format_double(stats.time_step * 1e6) << "\n";
  os << "z_m,v_mps,Th_uK,depth_uK,delta_r_mm,guided,stderr_v,n_captured\n";
  for (const auto& rec : stats.records) {
    const double depth = std::abs(model.guide_depth_at(rec.z));
    const double depth_uK = depth / constants::k_boltzmann * 1e6;
    const bool guided =
        2.0 * constants::k_boltzmann * rec.t_h < depth;
    os << format_double(rec.z) << ',' << format_double(rec.mean_vz) << ','
       << format_double(rec.t_h * 1e6) << ',' << format_double(depth_uK) << ','
       << format_double(rec.rms_radius * 1e3) << ',' << (guided ? 1 : 0) << ','
       << format_double(rec.stderr_vz) << ',' << rec.n_captured << "\n";
  }
  return os.str();
}

std::string sweep_csv(const RunConfig& cfg, const SweepTable& table) {
  std::ostringstream os;
  os << config_header(cfg);
  for (const auto& name : table.axis_names) os << name << ',';
  os << table.objective_name
     << ",v0,v_arrival,travel_time_ms,z_out_cm,delta_r_out_um,delta_r_arrival_mm,"
        "eta_percent,two_level_score,refined_score,validity_flags,error\n";
  for (const auto& row : table.rows) {
    for (const double c : row.coords) os << format_double(c) << ',';
    os << format_double(row.objective);
    if (row.error.empty()) {
      append_report_columns(os, row.report);
      os << ',';
    } else {
      for (int i = 0; i < 10; ++i) os << ',';
      os << ',' << sanitize_csv(row.error);
    }
    os << "\n";
  }
  return os.str();
}

ordered_json optimize_json(const RunConfig& cfg, const OptimizeSpec& spec,
                           const OptimizeResult& result) {
  ordered_json j;
  j["tool"] = "pushguide";
  j["version"] = version;
  j["config"] = config_json(cfg);
  j["objective"] = spec.objective;
  ordered_json best;
  for (std::size_t i = 0; i < spec.parameters.size(); ++i)
    best[spec.parameters[i]] = result.best_params[i];
  j["best"] = best;
  j["best_objective"] = result.best_objective;
  j["evaluations"] = result.evaluations;
  ordered_json trace = ordered_json::array();
  for (const auto& tp : result.trace) {
    ordered_json point;
    ordered_json params = ordered_json::array();
    for (const double p : tp.params) params.push_back(p);
    point["params"] = params;
    point["objective"] = number_or_null(tp.objective);
    trace.push_back(point);
  }
  j["trace"] = trace;
  return j;
}

}  // namespace pushguide::report
