// Command-line front end: scenario runner and one-shot energy / pressure
// evaluations. Batch only; all results go to files or stdout as CSV/JSON.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "cavity/config.hpp"
#include "cavity/scenario.hpp"
#include "cavity/version.hpp"

namespace {

// Cavity flags shared by `energy` and `pressure`. Bare numbers get the
// documented default unit appended (g, gamma in omega0; omega0 in omega_L).
struct CavityFlags {
  std::string length = "100 nm";
  std::string temperature = "0";
  std::string material = "pec";
  std::string mirror;  // full stack override, e.g. "gold 30 nm, glass inf"
  std::string mirror_bottom;
  std::string omega0 = "1 omega_L";
  std::string g = "0";
  std::string gamma = "0";
  std::string background = "1";
  double rel_tol = 1e-8;

  void add_to(CLI::App* app) {
    app->add_option("--L", length, "gap length (e.g. 100nm, 4um)");
    app->add_option("--T", temperature, "temperature in K");
    app->add_option("--material", material,
                    "mirror material: pec, gold, glass, water, vacuum");
    app->add_option("--mirror", mirror,
                    "full mirror stack, e.g. 'gold 30 nm, glass inf' (overrides --material)");
    app->add_option("--mirror-bottom", mirror_bottom,
                    "bottom stack when different from the top");
    app->add_option("--omega0", omega0, "gap resonance (default unit omega_L)");
    app->add_option("--g", g, "gap coupling (default unit omega0)");
    app->add_option("--gamma", gamma, "gap damping (default unit omega0)");
    app->add_option("--background", background, "gap background permittivity");
    app->add_option("--rel-tol", rel_tol, "quadrature relative tolerance");
  }

  static std::string with_default_unit(const std::string& raw, const char* unit) {
    const std::string trimmed = cavity::ConfigMap::trim(raw);
    for (char ch : trimmed)
      if (std::isalpha(static_cast<unsigned char>(ch)) && ch != 'e' && ch != 'E')
        return trimmed;  // already carries a unit
    return trimmed + " " + unit;
  }

  cavity::ConfigMap to_config() const {
    cavity::ConfigMap cfg;
    cfg.set("scenario", "custom");
    cfg.set("cavity.L", with_default_unit(length, "m"));
    cfg.set("cavity.T", temperature);
    cfg.set("cavity.gap.background", background);
    cfg.set("cavity.gap.omega0", with_default_unit(omega0, "omega_L"));
    cfg.set("cavity.gap.g", with_default_unit(g, "omega0"));
    cfg.set("cavity.gap.gamma", with_default_unit(gamma, "omega0"));
    cfg.set("cavity.mirror.top", mirror.empty() ? material : mirror);
    if (!mirror_bottom.empty()) cfg.set("cavity.mirror.bottom", mirror_bottom);
    char tol[32];
    std::snprintf(tol, sizeof tol, "%.17g", rel_tol);
    cfg.set("quadrature.rel_tol", tol);
    return cfg;
  }
};

int emit_single_table(const cavity::ResolvedScenario& sc, const cavity::ScenarioRun& run,
                      const std::string& output) {
  for (const auto& table : run.tables) {
    if (output.empty()) {
      if (sc.json_output)
        cavity::write_table_json(std::cout, table, sc);
      else
        cavity::write_table_csv(std::cout, table, sc);
    } else {
      cavity::ResolvedScenario target = sc;
      target.output_stem = output;
      const auto path = cavity::table_path(target, table);
      std::ofstream out(path);
      if (!out) throw cavity::ConfigError("output", "cannot write '" + path.string() + "'");
      if (sc.json_output)
        cavity::write_table_json(out, table, sc);
      else
        cavity::write_table_csv(out, table, sc);
      std::cerr << "wrote " << path.string() << "\n";
    }
  }
  return run.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Lifshitz energies of resonant planar cavities"};
  app.set_version_flag("--version", cavity::version_string);
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a scenario config file");
  std::string config_path;
  std::string run_output, run_format;
  double run_rel_tol = 0.0;
  int run_threads = 0;
  run_cmd->add_option("config", config_path, "scenario config file")->required();
  run_cmd->add_option("--output", run_output, "output path stem (overrides config)");
  run_cmd->add_option("--format", run_format, "csv or json (overrides config)");
  run_cmd->add_option("--rel-tol", run_rel_tol, "quadrature tolerance (overrides config)");
  run_cmd->add_option("--threads", run_threads, "worker thread cap (overrides config)");

  // energy
  auto* energy_cmd = app.add_subcommand("energy", "energy of a single cavity");
  CavityFlags energy_flags;
  energy_flags.add_to(energy_cmd);
  std::string energy_output, energy_format = "json", integrand_path;
  energy_cmd->add_option("--format", energy_format, "json (default) or csv");
  energy_cmd->add_option("--output", energy_output, "write to file instead of stdout");
  energy_cmd->add_option("--integrand", integrand_path,
                         "also write the sampled integrand (xi_rad_per_s, U_xi) as CSV");

  // pressure
  auto* pressure_cmd = app.add_subcommand("pressure", "-dU/dL by central differences");
  CavityFlags pressure_flags;
  pressure_flags.add_to(pressure_cmd);
  std::string dl_raw = "";
  pressure_cmd->add_option("--dL", dl_raw, "finite-difference step (default L/100)");

  // list-scenarios
  auto* list_cmd = app.add_subcommand("list-scenarios", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& [name, blurb] : cavity::scenario_catalog())
        std::printf("%-8s %s\n", name.c_str(), blurb.c_str());
      return 0;
    }

    if (run_cmd->parsed()) {
      cavity::ResolvedScenario sc = cavity::load_scenario_file(config_path);
      if (!run_output.empty()) sc.output_stem = run_output;
      if (!run_format.empty()) {
        if (run_format == "json")
          sc.json_output = true;
        else if (run_format == "csv")
          sc.json_output = false;
        else
          throw cavity::ConfigError("--format", "expected csv or json");
      }
      if (run_rel_tol > 0.0) sc.quad.rel_tol = run_rel_tol;
      if (run_threads > 0) sc.threads = run_threads;
      return cavity::run_scenario(sc);
    }

    if (energy_cmd->parsed()) {
      cavity::ConfigMap cfg = energy_flags.to_config();
      cfg.set("output.format", energy_format);
      cavity::ResolvedScenario sc = cavity::resolve_scenario(cfg);
      if (energy_format == "csv")
        return emit_single_table(sc, cavity::compute_scenario(sc), energy_output);
      if (energy_format != "json")
        throw cavity::ConfigError("--format", "expected csv or json");

      cavity::QuadratureSpec quad = sc.quad;
      quad.record_integrand = !integrand_path.empty();
      cavity::EnergyResult result;
      bool converged = true;
      try {
        result = (sc.cavity.temperature == 0.0) ? cavity::casimir_energy_T0(sc.cavity, quad)
                                                : cavity::free_energy_T(sc.cavity, quad);
      } catch (const cavity::ConvergenceError& err) {
        result.u_per_area = err.partial_value();
        result.rel_tol_achieved = err.achieved_rel_tol();
        converged = false;
      }
      if (energy_output.empty()) {
        cavity::write_energy_json(std::cout, result, sc, converged);
      } else {
        std::ofstream out(energy_output);
        if (!out)
          throw cavity::ConfigError("--output", "cannot write '" + energy_output + "'");
        cavity::write_energy_json(out, result, sc, converged);
      }
      if (!integrand_path.empty()) {
        std::ofstream out(integrand_path);
        if (!out)
          throw cavity::ConfigError("--integrand", "cannot write '" + integrand_path + "'");
        cavity::write_integrand_csv(out, result);
        std::cerr << "wrote " << integrand_path << " ("
                  << result.xi_integrand_samples.size() << " samples)\n";
      }
      return converged ? 0 : 2;
    }

    if (pressure_cmd->parsed()) {
      cavity::ConfigMap cfg = pressure_flags.to_config();
      cavity::ResolvedScenario sc = cavity::resolve_scenario(cfg);
      const double dl = dl_raw.empty() ? 0.01 * sc.cavity.gap_length
                                       : cavity::parse_length(dl_raw, "--dL");
      const auto result = cavity::pressure_finite_difference(sc.cavity, dl, sc.quad);
      std::printf("{\n  \"pressure\": %.17g,\n  \"pressure_half_step\": %.17g,\n"
                  "  \"richardson\": %.17g,\n  \"error_estimate\": %.17g\n}\n",
                  result.pressure, result.pressure_half_step, result.richardson,
                  result.error_estimate);
      return 0;
    }
  } catch (const cavity::ConfigError& err) {
    std::cerr << err.what() << "\n";
    return 1;
  } catch (const cavity::ConvergenceError& err) {
    std::cerr << "convergence failure: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
