#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bundled_configs.hpp"
#include "pushguide/config.hpp"
#include "pushguide/mot_rates.hpp"
#include "pushguide/report.hpp"
#include "pushguide/sweep.hpp"
#include "pushguide/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pushguide;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = ".";
  bool json = false;
  int threads = 0;
};

int resolved_threads(const CommonOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? int(hw) : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_run_config(const CommonOptions& opts) {
  ConfigDocument doc = parse_document(read_file(opts.config_path));
  for (const auto& assignment : opts.overrides) apply_override(doc, assignment);
  return parse_config(doc);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

void emit(const CommonOptions& opts, const ordered_json& json_doc,
          const std::string& human) {
  if (opts.json) {
    std::cout << json_doc.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

int cmd_simulate(const CommonOptions& opts) {
  const RunConfig cfg = load_run_config(opts);
  const TransportModel model = make_model(cfg);
  const EfficiencyReport rep = model.report();
  write_file(fs::path(opts.out_dir) / "profile.csv", report::profile_csv(cfg, model));
  emit(opts, report::report_json(cfg, rep),
       report::report_human(rep) + "profile written to " +
           (fs::path(opts.out_dir) / "profile.csv").string() + "\n");
  return 0;
}

int cmd_sweep(const CommonOptions& opts) {
  const RunConfig cfg = load_run_config(opts);
  if (!cfg.sweep) throw ConfigError("sweep: config has no sweep.* block");
  const SweepTable table = run_sweep(*cfg.sweep, cfg, resolved_threads(opts));
  const fs::path out = fs::path(opts.out_dir) / "sweep.csv";
  write_file(out, report::sweep_csv(cfg, table));

  const long best = table.best_row();
  ordered_json j;
  j["tool"] = "pushguide";
  j["version"] = version;
  j["rows"] = table.rows.size();
  j["output"] = out.string();
  std::ostringstream human;
  human << "sweep: " << table.rows.size() << " rows -> " << out.string() << "\n";
  if (best >= 0) {
    const auto& row = table.rows[std::size_t(best)];
    ordered_json jb;
    for (std::size_t a = 0; a < table.axis_names.size(); ++a)
      jb[table.axis_names[a]] = row.coords[a];
    jb[table.objective_name] = row.objective;
    j["best"] = jb;
    human << "best " << table.objective_name << " = "
          << report::format_double(row.objective) << " at";
    for (std::size_t a = 0; a < table.axis_names.size(); ++a)
      human << ' ' << table.axis_names[a] << " = "
            << report::format_double(row.coords[a]);
    human << "\n";
  } else {
    j["best"] = nullptr;
    human << "best: none (all cells failed)\n";
  }
  emit(opts, j, human.str());
  return 0;
}

int cmd_optimize(const CommonOptions& opts) {
  const RunConfig cfg = load_run_config(opts);
  if (!cfg.optimize) throw ConfigError("optimize: config has no optimize.* block");
  const OptimizeResult result = optimize(*cfg.optimize, cfg, resolved_threads(opts));
  const ordered_json j = report::optimize_json(cfg, *cfg.optimize, result);
  const fs::path out = fs::path(opts.out_dir) / "optimize.json";
  write_file(out, j.dump(2) + "\n");

  std::ostringstream human;
  human << "optimize: best " << cfg.optimize->objective << " = "
        << report::format_double(result.best_objective) << " after "
        << result.evaluations << " evaluations\n";
  for (std::size_t i = 0; i < cfg.optimize->parameters.size(); ++i)
    human << "  " << cfg.optimize->parameters[i] << " = "
          << report::format_double(result.best_params[i]) << "\n";
  human << "trace written to " << out.string() << "\n";
  emit(opts, j, human.str());
  return 0;
}

int cmd_mc(const CommonOptions& opts) {
  const RunConfig cfg = load_run_config(opts);
  const TransportModel model = make_model(cfg);
  McConfig mc = cfg.mc;
  mc.entrance_velocity = model.entrance_velocity();
  mc.threads = resolved_threads(opts);
  const McStats stats = run_ensemble(mc, cfg.beam, cfg.species, model.pumping(),
                                     cfg.geometry, cfg.model.bracket);
  const fs::path out = fs::path(opts.out_dir) / "mc_profile.csv";
  write_file(out, report::mc_csv(cfg, model, stats));

  ordered_json j;
  j["tool"] = "pushguide";
  j["version"] = version;
  j["n_atoms"] = stats.n_atoms;
  j["mean_v_arrival"] = stats.mean_v_arrival;
  j["stderr_v_arrival"] = stats.stderr_v_arrival;
  j["stddev_v_arrival"] = stats.stddev_v_arrival;
  j["n_captured"] = stats.n_captured;
  j["analytic_v_arrival"] = model.velocity(cfg.geometry.trap_separation);
  j["output"] = out.string();
  std::ostringstream human;
  human << "mc: " << stats.n_atoms << " atoms, mean v(D) = "
        << report::format_double(stats.mean_v_arrival) << " +- "
        << report::format_double(stats.stderr_v_arrival) << " m/s (analytic "
        << report::format_double(model.velocity(cfg.geometry.trap_separation))
        << "), captured " << stats.n_captured << "\n"
        << "profile written to " << out.string() << "\n";
  emit(opts, j, human.str());
  return 0;
}

int cmd_rates(const CommonOptions& opts) {
  const RunConfig cfg = load_run_config(opts);
  if (!cfg.rates) throw ConfigError("rates: config has no rates.* block");
  const auto& in = *cfg.rates;
  const OutgoingFlux flux =
      outgoing_flux(in.loading_rate_1, in.background_loss, in.n1_with_push);
  ordered_json j;
  j["tool"] = "pushguide";
  j["version"] = version;
  j["L_out"] = flux.value;
  j["clamped"] = flux.clamped;
  std::ostringstream human;
  human << "outgoing flux L_out = " << report::format_double(flux.value) << " atoms/s";
  if (flux.clamped) human << " (negative raw value clamped to zero)";
  human << "\n";
  if (flux.value > 0) {
    const TransferEfficiency eff = transfer_efficiency(in.loading_rate_2, flux.value);
    j["transfer_efficiency"] = eff.value;
    j["above_unity"] = eff.above_unity;
    human << "transfer efficiency  = " << report::format_double(eff.value);
    if (eff.above_unity) human << " (above unity: check the input fluxes)";
    human << "\n";
  } else {
    j["transfer_efficiency"] = nullptr;
  }
  emit(opts, j, human.str());
  return 0;
}

int cmd_figures(const CommonOptions& opts) {
  // Datasets behind the three summary plots, from the bundled setups.
  RunConfig cs = parse_config(std::string(bundled::cs_paper));
  RunConfig rb = parse_config(std::string(bundled::rb_paper));
  const int threads = resolved_threads(opts);

  // Two-level efficiency vs detuning for the Cs beam at 10 and 46 mW.
  std::ostringstream fig3;
  fig3 << report::config_header(cs);
  fig3 << "detuning_GHz,efficiency_10mW,efficiency_46mW\n";
  for (int i = 0; i < 200; ++i) {
    const double det = -8.0 + (8.0 - 0.2) * double(i) / 199.0;
    RunConfig p10 = cs;
    apply_parameter(p10, "beam.detuning_GHz", det);
    apply_parameter(p10, "beam.power_mW", 10.0);
    RunConfig p46 = p10;
    apply_parameter(p46, "beam.power_mW", 46.0);
    const double e10 =
        two_level_efficiency(p10.species, p10.beam, p10.geometry, p10.model.f_exponent);
    const double e46 =
        two_level_efficiency(p46.species, p46.beam, p46.geometry, p46.model.f_exponent);
    fig3 << report::format_double(det) << ',' << report::format_double(e10) << ','
         << report::format_double(e46) << "\n";
  }
  write_file(fs::path(opts.out_dir) / "fig3_cs.csv", fig3.str());

  // Refined efficiency vs detuning for the Rb beam at 10, 15 and 21 mW.
  SweepSpec fig5_spec;
  fig5_spec.objective = "refined_score";
  SweepAxis det_axis;
  det_axis.parameter = "beam.detuning_GHz";
  for (int i = 0; i < 200; ++i)
    det_axis.values.push_back(-2.5 + (2.5 - 0.2) * double(i) / 199.0);
  SweepAxis pow_axis;
  pow_axis.parameter = "beam.power_mW";
  pow_axis.values = {10.0, 15.0, 21.0};
  fig5_spec.axes = {det_axis, pow_axis};
  const SweepTable fig5 = run_sweep(fig5_spec, rb, threads);
  std::ostringstream fig5_csv;
  fig5_csv << report::config_header(rb);
  fig5_csv << "detuning_GHz,score_10mW,score_15mW,score_21mW\n";
  for (std::size_t i = 0; i < det_axis.values.size(); ++i) {
    fig5_csv << report::format_double(det_axis.values[i]);
    for (std::size_t p = 0; p < 3; ++p) {
      const auto& row = fig5.rows[i * 3 + p];
      fig5_csv << ',' << report::format_double(row.objective);
    }
    fig5_csv << "\n";
  }
  write_file(fs::path(opts.out_dir) / "fig5_rb.csv", fig5_csv.str());

  // Travel time vs power for the Rb beam, refined and two-level models.
  std::ostringstream fig8;
  fig8 << report::config_header(rb);
  fig8 << "power_mW,travel_time_ms,travel_time_two_level_ms\n";
  for (int i = 0; i < 39; ++i) {
    const double p = 2.0 + 0.5 * double(i);
    RunConfig cfg = rb;
    apply_parameter(cfg, "beam.power_mW", p);
    const TransportModel model = make_model(cfg);
    const TwoLevelResult two =
        two_level_details(cfg.species, cfg.beam, cfg.geometry, cfg.model.f_exponent);
    fig8 << report::format_double(p) << ','
         << report::format_double(model.travel_time() * 1e3) << ','
         << report::format_double(two.travel_time * 1e3) << "\n";
  }
  write_file(fs::path(opts.out_dir) / "fig8_rb.csv", fig8.str());

  ordered_json j;
  j["tool"] = "pushguide";
  j["version"] = version;
  j["outputs"] = {(fs::path(opts.out_dir) / "fig3_cs.csv").string(),
                  (fs::path(opts.out_dir) / "fig5_rb.csv").string(),
                  (fs::path(opts.out_dir) / "fig8_rb.csv").string()};
  emit(opts, j,
       "figures: fig3_cs.csv, fig5_rb.csv, fig8_rb.csv written to " + opts.out_dir +
           "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pushguide: continuous transfer of cold atoms between two traps "
               "by a red-detuned pushing-guiding laser"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  CommonOptions opts;
  app.add_option("--config", opts.config_path, "configuration file");
  app.add_option("--set", opts.overrides, "override a config key (key=value)");
  app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  app.add_flag("--json", opts.json, "machine-readable stdout");
  app.add_option("--threads", opts.threads, "worker threads (results are invariant)");

  auto* simulate = app.add_subcommand("simulate", "one transport run with full report");
  auto* sweep = app.add_subcommand("sweep", "evaluate the objective on a parameter grid");
  auto* optimize = app.add_subcommand("optimize", "maximize the objective within bounds");
  auto* mc = app.add_subcommand("mc", "stochastic single-atom ensemble");
  auto* rates = app.add_subcommand("rates", "trap loading-rate bookkeeping");
  auto* figures = app.add_subcommand("figures", "emit the reference figure datasets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(figures)) return cmd_figures(opts);
    if (opts.config_path.empty())
      throw ConfigError("--config is required for this subcommand");
    if (app.got_subcommand(simulate)) return cmd_simulate(opts);
    if (app.got_subcommand(sweep)) return cmd_sweep(opts);
    if (app.got_subcommand(optimize)) return cmd_optimize(opts);
    if (app.got_subcommand(mc)) return cmd_mc(opts);
    if (app.got_subcommand(rates)) return cmd_rates(opts);
    throw ConfigError("unknown subcommand");
  } catch (const ConfigError& e) {
    ordered_json err{{"error", {{"code", 2}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 2;
  } catch (const ModelError& e) {
    ordered_json err{{"error", {{"code", 3}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    ordered_json err{{"error", {{"code", 4}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 4;
  }
}
