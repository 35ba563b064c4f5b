#pragma once

#include <string>

#include <json.hpp>

#include "pushguide/config.hpp"
#include "pushguide/monte_carlo.hpp"
#include "pushguide/sweep.hpp"
#include "pushguide/transport.hpp"

namespace pushguide::report {

/// Locale-independent shortest round-trip formatting.
std::string format_double(double v);

/// `# key = value` header block echoing the effective configuration.
std::string config_header(const RunConfig& cfg);

nlohmann::ordered_json config_json(const RunConfig& cfg);
nlohmann::ordered_json report_json(const RunConfig& cfg, const EfficiencyReport& r);
std::string report_human(const EfficiencyReport& r);

std::string profile_csv(const RunConfig& cfg, const TransportModel& model);
std::string mc_csv(const RunConfig& cfg, const TransportModel& model, const McStats& stats);
std::string sweep_csv(const RunConfig& cfg, const SweepTable& table);
nlohmann::ordered_json optimize_json(const RunConfig& cfg, const OptimizeSpec& spec,
                                     const OptimizeResult& result);

}  // namespace pushguide::report
