#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "cavity/config.hpp"
#include "cavity/hopfield.hpp"
#include "cavity/lifshitz.hpp"
#include "cavity/ssa.hpp"
#include "cavity/version.hpp"

// Scenario runner: named figure-data scenarios plus a generic custom sweep.
// Each scenario produces one or more tables; every output file carries the
// tool version, the fully resolved configuration and the tolerances reached,
// so a run can be reproduced byte for byte from its own header.

namespace cavity {

struct Table {
  std::string name;  // suffix for multi-table scenarios; empty for a single table
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_ok;  // parallel to rows; 0 marks a partial (unconverged) row
  double max_rel_tol_achieved = 0.0;

  void add_row(std::vector<double> row, bool ok = true) {
    rows.push_back(std::move(row));
    row_ok.push_back(ok ? 1 : 0);
  }
  bool any_unconverged() const {
    for (int ok : row_ok)
      if (!ok) return true;
    return false;
  }
};

struct ScenarioRun {
  std::vector<Table> tables;
  int exit_code = 0;  // 0 ok, 2 partial results
};

namespace detail {

// Sweep points are independent; rows land in grid order no matter which
// worker finishes first.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct PointOutcome {
  EnergyResult energy;
  bool ok = true;
};

// One converged (or partial) energy for a cavity, T = 0 or finite.
inline PointOutcome evaluate_energy(const CavityConfig& cfg, const QuadratureSpec& spec) {
  PointOutcome out;
  try {
    out.energy = (cfg.temperature == 0.0) ? casimir_energy_T0(cfg, spec)
                                          : free_energy_T(cfg, spec);
  } catch (const ConvergenceError& err) {
    out.energy.u_per_area = err.partial_value();
    out.energy.rel_tol_achieved = err.achieved_rel_tol();
    out.ok = false;
  }
  return out;
}

inline PointOutcome evaluate_delta(const CavityConfig& cfg, const QuadratureSpec& spec) {
  PointOutcome out;
  try {
    out.energy = delta_U(cfg, spec);
  } catch (const ConvergenceError& err) {
    out.energy.u_per_area = err.partial_value();
    out.energy.rel_tol_achieved = err.achieved_rel_tol();
    out.ok = false;
  }
  return out;
}

inline double config_frequency(const ResolvedScenario& sc, const std::string& key,
                               const std::string& fallback) {
  return parse_frequency(sc.resolved.get_or(key, fallback), key, sc.omega0, sc.omega_L);
}

}  // namespace detail

/// Catalog of built-in scenarios with one-line descriptions.
inline std::vector<std::pair<std::string, std::string>> scenario_catalog() {
  return {
      {"fig1b", "cavity polariton branches vs in-plane momentum (PEC, g = 0.2 w0)"},
      {"fig1d", "energy integrand on the real and imaginary frequency axes"},
      {"fig1e", "|U(g)|/|U(0)| vs coupling for an ideal-mirror cavity at T = 0"},
      {"fig2a", "relative shift vs coupling: full theory, single mode, static screening"},
      {"fig2b", "absolute shift vs gap length: full theory vs single mode"},
      {"fig2c", "gold-mirror free energy vs gap length at 300 K, coupled and uncoupled"},
      {"fig2d", "coupling-induced shift vs gap length at several temperatures"},
      {"fig3a", "gold/water cavity energy vs gap length per coupling, with spectra"},
      {"fig3b", "per-molecule shift vs gap length at room temperature"},
      {"custom", "generic sweep of one cavity parameter from the config file"},
  };
}

/// Built-in defaults for a scenario; user config entries override these.
inline ConfigMap scenario_defaults(const std::string& name) {
  static const std::map<std::string, const char*> presets = {
      {"fig1b", R"(
scenario: fig1b
cavity.L: 100 nm
cavity.gap.omega0: 2 omega_L
cavity.gap.g: 0.2 omega0
cavity.mirror.top: pec
polariton.n_max: 4
polariton.q_points: 161
polariton.q_max_pi_over_L: 4
)"},
      {"fig1d", R"(
scenario: fig1d
cavity.L: 100 nm
cavity.gap.omega0: 1 omega_L
cavity.gap.g: 0.5 omega0
cavity.mirror.top: pec
diagnostic.gamma: 0.02 omega0
diagnostic.omega_max: 3.5 omega0
diagnostic.points: 241
quadrature.rel_tol: 1e-6
)"},
      {"fig1e", R"(
scenario: fig1e
cavity.L: 100 nm
cavity.gap.omega0: 1 omega_L
cavity.mirror.top: pec
sweep.variable: g
sweep.from: 0 omega0
sweep.to: 3 omega0
sweep.points: 31
)"},
      {"fig2a", R"(
scenario: fig2a
cavity.L: 100 nm
cavity.gap.omega0: 1 omega_L
cavity.mirror.top: pec
sweep.variable: g
sweep.from: 0 omega0
sweep.to: 3 omega0
sweep.points: 31
)"},
      {"fig2b", R"(
scenario: fig2b
cavity.L: 100 nm
cavity.gap.omega0: 1 omega_L
cavity.gap.g: 0.5 omega0
cavity.mirror.top: pec
sweep.variable: L
sweep.from: 10 nm
sweep.to: 2000 nm
sweep.points: 25
sweep.scale: log
)"},
      {"fig2c", R"(
scenario: fig2c
cavity.L: 100 nm
cavity.T: 300 K
cavity.gap.omega0: 1 omega_L
cavity.gap.g: 1 omega0
cavity.mirror.top: gold 30 nm, glass inf
sweep.variable: L
sweep.from: 100 nm
sweep.to: 10 um
sweep.points: 25
sweep.scale: log
)"},
      {"fig2d", R"(
scenario: fig2d
cavity.L: 100 nm
cavity.gap.omega0: 1 omega_L
cavity.gap.g: 1 omega0
cavity.mirror.top: gold 30 nm, glass inf
temperatures: 0, 77, 300
sweep.variable: L
sweep.from: 100 nm
sweep.to: 10 um
sweep.points: 19
sweep.scale: log
)"},
      {"fig3a", R"(
scenario: fig3a
cavity.L: 100 nm
cavity.T: 300 K
cavity.gap.background: 1.77
cavity.gap.omega0: 1 omega_L
cavity.mirror.top: gold 30 nm, glass inf
couplings: 0, 0.1, 0.5, 1
transmission.gamma: 0.05 omega0
transmission.omega_max: 3 omega0
transmission.points: 1200
sweep.variable: L
sweep.from: 50 nm
sweep.to: 2 um
sweep.points: 21
sweep.scale: log
)"},
      {"fig3b", R"(
scenario: fig3b
cavity.L: 100 nm
cavity.T: 300 K
cavity.gap.background: 1.77
cavity.gap.omega0: 1 omega_L
cavity.gap.g: 1 omega0
cavity.mirror.top: gold 30 nm, glass inf
molecules.rho_per_m3: 1e27
sweep.variable: L
sweep.from: 5 nm
sweep.to: 100 nm
sweep.points: 21
sweep.scale: log
)"},
      {"custom", "scenario: custom\n"},
  };
  const auto it = presets.find(name);
  if (it == presets.end())
    throw ConfigError("scenario", "unknown scenario '" + name + "'");
  return ConfigMap::from_string(it->second);
}

/// Assumptions baked into the figure presets that the source material leaves
/// open; echoed into every output header.
inline std::vector<std::string> scenario_assumptions(const std::string& name) {
  std::vector<std::string> out;
  if (name == "fig2c" || name == "fig2d" || name == "fig3a" || name == "fig3b")
    out.push_back("gold Drude parameters 9.02 eV / 0.0265 eV are literature values");
  if (name == "fig3a" || name == "fig3b")
    out.push_back("water background eps = 1.77 and glass eps = 2.1 are assumed");
  if (name == "fig1d") out.push_back("diagnostic broadening gamma is a plotting choice");
  if (name == "fig2d") out.push_back("temperature set {0, 77, 300} K is assumed");
  if (name == "fig3b") out.push_back("molecular concentration rho is assumed");
  if (name == "fig1d" || name == "fig2b" || name == "fig3b")
    out.push_back("coupling strength g for this figure is assumed");
  return out;
}

/// Load a scenario config file: read the file, pull in the preset defaults
/// for its scenario name, apply the file entries on top and resolve.
inline ResolvedScenario load_scenario_file(const std::string& path) {
  const ConfigMap user = ConfigMap::from_file(path);
  ConfigMap merged = scenario_defaults(user.get_or("scenario", "custom"));
  merged.merge_over(user);
  ResolvedScenario sc = resolve_scenario(merged);
  sc.assumed = scenario_assumptions(sc.name);
  return sc;
}

// ---------------------------------------------------------------------------
// scenario computations
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> parse_list(const std::string& raw, const std::string& field) {
  std::vector<double> out;
  std::istringstream in(raw);
  std::string part;
  while (std::getline(in, part, ','))
    out.push_back(parse_number(ConfigMap::trim(part), field));
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

inline Table polariton_table(const ResolvedScenario& sc) {
  const int n_max = parse_int(sc.resolved.get_or("polariton.n_max", "4"), "polariton.n_max");
  const int q_points =
      parse_int(sc.resolved.get_or("polariton.q_points", "161"), "polariton.q_points");
  const double q_max = parse_number(sc.resolved.get_or("polariton.q_max_pi_over_L", "4"),
                                    "polariton.q_max_pi_over_L") *
                       pi / sc.cavity.gap_length;
  const auto* lor = std::get_if<LorentzMedium>(&sc.cavity.gap);
  if (!lor) throw ConfigError("cavity.gap.omega0", "polariton table needs a resonant gap");
  const CouplingSpec spec{lor->omega0, lor->g, sc.omega_L};

  Table t;
  t.name = "branches";
  t.columns = {"q", "n", "omega_minus", "omega_plus"};
  for (int n = 1; n <= n_max; ++n)
    for (int i = 0; i < q_points; ++i) {
      const double q = q_max * i / (q_points - 1);
      const PolaritonPair pair = cavity_polaritons(q, n, sc.cavity.gap_length, spec);
      t.add_row({q, static_cast<double>(n), pair.omega_minus, pair.omega_plus});
    }
  return t;
}

inline ScenarioRun integrand_tables(const ResolvedScenario& sc) {
  const double gamma = config_frequency(sc, "diagnostic.gamma", "0.02 omega0");
  const double omega_max = config_frequency(sc, "diagnostic.omega_max", "3.5 omega0");
  const int points = parse_int(sc.resolved.get_or("diagnostic.points", "241"),
                               "diagnostic.points");
  const CavityConfig coupled = sc.cavity;
  const CavityConfig empty = sc.cavity.decoupled();

  ScenarioRun run;
  Table real_axis;
  real_axis.name = "real_axis";
  real_axis.columns = {"omega_over_omega0", "u_omega_uncoupled", "u_omega_coupled"};
  Table imag_axis;
  imag_axis.name = "imag_axis";
  imag_axis.columns = {"xi_over_omega0", "u_xi_uncoupled", "u_xi_coupled"};
  real_axis.rows.resize(points);
  real_axis.row_ok.assign(points, 1);
  imag_axis.rows.resize(points);
  imag_axis.row_ok.assign(points, 1);

  detail::parallel_for(points, sc.threads, [&](int i) {
    const double omega = omega_max * (i + 1) / points;  // skip omega = 0
    real_axis.rows[i] = {omega / sc.omega0, integrand_omega(empty, omega, gamma, sc.quad),
                         integrand_omega(coupled, omega, gamma, sc.quad)};
    const double xi = omega_max * i / (points - 1);
    imag_axis.rows[i] = {xi / sc.omega0, integrand_xi(empty, xi, sc.quad),
                         integrand_xi(coupled, xi, sc.quad)};
  });
  run.tables = {std::move(real_axis), std::move(imag_axis)};
  return run;
}

// fig1e and fig2a: coupling sweeps of the ideal-mirror cavity at T = 0,
// normalized to the uncoupled energy.
inline ScenarioRun coupling_sweep(const ResolvedScenario& sc, bool with_comparisons) {
  const auto* lor = std::get_if<LorentzMedium>(&sc.cavity.gap);
  if (!lor) throw ConfigError("cavity.gap.omega0", "coupling sweep needs a resonant gap");

  const PointOutcome base = evaluate_energy(cavity_with(sc, "g", 0.0), sc.quad);
  const int n = static_cast<int>(sc.sweep_values.size());

  Table t;
  t.columns = with_comparisons
                  ? std::vector<std::string>{"g_over_omega0", "rel_shift_lifshitz",
                                             "rel_shift_hopfield", "rel_shift_ssa"}
                  : std::vector<std::string>{"g_over_omega0", "U_over_U0", "u_per_area"};
  t.rows.resize(n);
  t.row_ok.assign(n, 1);
  t.max_rel_tol_achieved = base.energy.rel_tol_achieved;

  std::vector<double> achieved(n, 0.0);
  detail::parallel_for(n, sc.threads, [&](int i) {
    const double g = sc.sweep_values[i];
    const PointOutcome point = evaluate_energy(cavity_with(sc, "g", g), sc.quad);
    const double ratio = point.energy.u_per_area / base.energy.u_per_area;
    if (with_comparisons) {
      const CouplingSpec spec{sc.omega0, g, sc.omega_L};
      t.rows[i] = {g / sc.omega0, 1.0 - ratio, single_mode_relative(spec),
                   ssa_relative_shift(sc.omega0, g, lor->eps_inf)};
    } else {
      t.rows[i] = {g / sc.omega0, ratio, point.energy.u_per_area};
    }
    t.row_ok[i] = (point.ok && base.ok) ? 1 : 0;
    achieved[i] = point.energy.rel_tol_achieved;
  });
  for (double a : achieved) t.max_rel_tol_achieved = std::max(t.max_rel_tol_achieved, a);

  ScenarioRun run;
  run.tables.push_back(std::move(t));
  run.exit_code = run.tables[0].any_unconverged() ? 2 : 0;
  return run;
}

// fig2b: absolute shifts vs gap length, full theory against the single-mode
// model (different units on purpose: J/m^2 vs J).
inline ScenarioRun length_shift_sweep(const ResolvedScenario& sc) {
  const auto* lor = std::get_if<LorentzMedium>(&sc.cavity.gap);
  if (!lor) throw ConfigError("cavity.gap.omega0", "shift sweep needs a resonant gap");
  const int n = static_cast<int>(sc.sweep_values.size());

  Table t;
  t.columns = {"L_nm", "delta_u_lifshitz", "delta_u1_hopfield"};
  t.rows.resize(n);
  t.row_ok.assign(n, 1);
  std::vector<double> achieved(n, 0.0);

  detail::parallel_for(n, sc.threads, [&](int i) {
    const double length = sc.sweep_values[i];
    const PointOutcome diff = evaluate_delta(cavity_with(sc, "L", length), sc.quad);
    const double du1 =
        single_mode_shift(CouplingSpec::for_gap(lor->omega0, lor->g, length));
    t.rows[i] = {length * 1e9, diff.energy.u_per_area, du1};
    t.row_ok[i] = diff.ok ? 1 : 0;
    achieved[i] = diff.energy.rel_tol_achieved;
  });
  for (double a : achieved) t.max_rel_tol_achieved = std::max(t.max_rel_tol_achieved, a);

  ScenarioRun run;
  run.tables.push_back(std::move(t));
  run.exit_code = run.tables[0].any_unconverged() ? 2 : 0;
  return run;
}

// fig2c: coupled and uncoupled free energy vs gap length, with the
// statically screened uncoupled curve overlaid the way the dashed lines are.
inline ScenarioRun gold_merging_sweep(const ResolvedScenario& sc) {
  const auto* lor = std::get_if<LorentzMedium>(&sc.cavity.gap);
  if (!lor) throw ConfigError("cavity.gap.omega0", "needs a resonant gap");
  const double screen = std::sqrt(lor->static_eps() / lor->eps_inf);
  const int n = static_cast<int>(sc.sweep_values.size());

  Table t;
  t.columns = {"L_um", "f_uncoupled", "f_coupled", "f_uncoupled_static_screened"};
  t.rows.resize(n);
  t.row_ok.assign(n, 1);
  std::vector<double> achieved(n, 0.0);

  detail::parallel_for(n, sc.threads, [&](int i) {
    const double length = sc.sweep_values[i];
    const CavityConfig coupled = cavity_with(sc, "L", length);
    const PointOutcome on = evaluate_energy(coupled, sc.quad);
    const PointOutcome off = evaluate_energy(coupled.decoupled(), sc.quad);
    t.rows[i] = {length * 1e6, off.energy.u_per_area, on.energy.u_per_area,
                 off.energy.u_per_area / screen};
    t.row_ok[i] = (on.ok && off.ok) ? 1 : 0;
    achieved[i] = std::max(on.energy.rel_tol_achieved, off.energy.rel_tol_achieved);
  });
  for (double a : achieved) t.max_rel_tol_achieved = std::max(t.max_rel_tol_achieved, a);

  ScenarioRun run;
  run.tables.push_back(std::move(t));
  run.exit_code = run.tables[0].any_unconverged() ? 2 : 0;
  return run;
}

// fig2d: coupling-induced shift vs gap length at a set of temperatures.
inline ScenarioRun temperature_shift_sweep(const ResolvedScenario& sc) {
  const std::vector<double> temps =
      parse_list(sc.resolved.get_or("temperatures", "0, 77, 300"), "temperatures");
  const int n = static_cast<int>(sc.sweep_values.size());

  Table t;
  t.columns = {"L_um"};
  for (double temp : temps) {
    char label[64];
    std::snprintf(label, sizeof label, "delta_u_%gK", temp);
    t.columns.push_back(label);
  }
  t.rows.resize(n);
  t.row_ok.assign(n, 1);
  std::vector<double> achieved(n, 0.0);

  detail::parallel_for(n, sc.threads, [&](int i) {
    const double length = sc.sweep_values[i];
    std::vector<double> row{length * 1e6};
    bool ok = true;
    double worst = 0.0;
    for (double temp : temps) {
      CavityConfig cfg = cavity_with(sc, "L", length);
      cfg.temperature = temp;
      const PointOutcome diff = evaluate_delta(cfg, sc.quad);
      row.push_back(diff.energy.u_per_area);
      ok = ok && diff.ok;
      worst = std::max(worst, diff.energy.rel_tol_achieved);
    }
    t.rows[i] = std::move(row);
    t.row_ok[i] = ok ? 1 : 0;
    achieved[i] = worst;
  });
  for (double a : achieved) t.max_rel_tol_achieved = std::max(t.max_rel_tol_achieved, a);

  ScenarioRun run;
  run.tables.push_back(std::move(t));
  run.exit_code = run.tables[0].any_unconverged() ? 2 : 0;
  return run;
}

inline PlanarRegions transmission_regions(const CavityConfig& cfg) {
  PlanarRegions regions;
  const auto& top = cfg.top.layers;
  const auto& bottom = cfg.bottom.layers;
  regions.entry = top.back().material;
  for (std::size_t i = top.size() - 1; i-- > 0;) regions.films.push_back(top[i]);
  regions.films.push_back(Layer{cfg.gap, cfg.gap_length});
  for (std::size_t i = 0; i + 1 < bottom.size(); ++i) regions.films.push_back(bottom[i]);
  regions.exit = bottom.back().material;
  return regions;
}

// fig3a: free energy vs gap length for each coupling, plus normal-incidence
// transmission spectra of the 100 nm cavity.
inline ScenarioRun water_cavity_sweep(const ResolvedScenario& sc) {
  const std::vector<double> couplings =
      parse_list(sc.resolved.get_or("couplings", "0, 0.1, 0.5, 1"), "couplings");
  const int n = static_cast<int>(sc.sweep_values.size());

  Table energy;
  energy.name = "energy";
  energy.columns = {"L_nm"};
  for (double gr : couplings) {
    char label[64];
    std::snprintf(label, sizeof label, "f_g%g", gr);
    energy.columns.push_back(label);
  }
  energy.rows.resize(n);
  energy.row_ok.assign(n, 1);
  std::vector<double> achieved(n, 0.0);

  detail::parallel_for(n, sc.threads, [&](int i) {
    const double length = sc.sweep_values[i];
    std::vector<double> row{length * 1e9};
    bool ok = true;
    double worst = 0.0;
    for (double gr : couplings) {
      CavityConfig cfg = cavity_with(sc, "L", length);
      std::get<LorentzMedium>(cfg.gap).g = gr * sc.omega0;
      const PointOutcome point = evaluate_energy(cfg, sc.quad);
      row.push_back(point.energy.u_per_area);
      ok = ok && point.ok;
      worst = std::max(worst, point.energy.rel_tol_achieved);
    }
    energy.rows[i] = std::move(row);
    energy.row_ok[i] = ok ? 1 : 0;
    achieved[i] = worst;
  });
  for (double a : achieved)
    energy.max_rel_tol_achieved = std::max(energy.max_rel_tol_achieved, a);

  Table spectra;
  spectra.name = "transmission";
  spectra.columns = {"omega_over_omega0"};
  for (double gr : couplings) {
    char label[64];
    std::snprintf(label, sizeof label, "T_g%g", gr);
    spectra.columns.push_back(label);
  }
  const double gamma_t = config_frequency(sc, "transmission.gamma", "0.05 omega0");
  const double omega_max = config_frequency(sc, "transmission.omega_max", "3 omega0");
  const int points = parse_int(sc.resolved.get_or("transmission.points", "1200"),
                               "transmission.points");
  for (int i = 1; i <= points; ++i) {
    const double omega = omega_max * i / points;
    std::vector<double> row{omega / sc.omega0};
    for (double gr : couplings) {
      CavityConfig cfg = sc.cavity;
      auto& gap = std::get<LorentzMedium>(cfg.gap);
      gap.g = gr * sc.omega0;
      gap.gamma = gamma_t;
      row.push_back(transmission(transmission_regions(cfg), omega));
    }
    spectra.add_row(std::move(row));
  }

  ScenarioRun run;
  run.exit_code = energy.any_unconverged() ? 2 : 0;
  run.tables = {std::move(energy), std::move(spectra)};
  return run;
}

// fig3b: coupling-induced free-energy change per molecule vs gap length,
// with the thermal energy scale alongside.
inline ScenarioRun per_molecule_sweep(const ResolvedScenario& sc) {
  const double rho = parse_number(sc.resolved.get_or("molecules.rho_per_m3", "1e27"),
                                  "molecules.rho_per_m3");
  const int n = static_cast<int>(sc.sweep_values.size());

  Table t;
  t.columns = {"L_nm", "delta_f_per_molecule", "k_B_T"};
  t.rows.resize(n);
  t.row_ok.assign(n, 1);
  std::vector<double> achieved(n, 0.0);

  detail::parallel_for(n, sc.threads, [&](int i) {
    const double length = sc.sweep_values[i];
    const PointOutcome diff = evaluate_delta(cavity_with(sc, "L", length), sc.quad);
    t.rows[i] = {length * 1e9, per_molecule(diff.energy.u_per_area, rho, length),
                 k_boltzmann * sc.cavity.temperature};
    t.row_ok[i] = diff.ok ? 1 : 0;
    achieved[i] = diff.energy.rel_tol_achieved;
  });
  for (double a : achieved) t.max_rel_tol_achieved = std::max(t.max_rel_tol_achieved, a);

  ScenarioRun run;
  run.tables.push_back(std::move(t));
  run.exit_code = run.tables[0].any_unconverged() ? 2 : 0;
  return run;
}

// custom: sweep one variable (or evaluate the single configured point).
inline ScenarioRun generic_sweep(const ResolvedScenario& sc) {
  Table t;
  const std::string var = sc.sweep_variable.empty() ? "point" : sc.sweep_variable;
  t.columns = {var, "u_per_area", "rel_tol_achieved", "matsubara_terms"};
  const std::vector<double> values =
      sc.sweep_variable.empty() ? std::vector<double>{0.0} : sc.sweep_values;
  const int n = static_cast<int>(values.size());
  t.rows.resize(n);
  t.row_ok.assign(n, 1);

  detail::parallel_for(n, sc.threads, [&](int i) {
    const CavityConfig cfg =
        sc.sweep_variable.empty() ? sc.cavity : cavity_with(sc, sc.sweep_variable, values[i]);
    const PointOutcome point = evaluate_energy(cfg, sc.quad);
    t.rows[i] = {values[i], point.energy.u_per_area, point.energy.rel_tol_achieved,
                 static_cast<double>(point.energy.matsubara_terms_used)};
    t.row_ok[i] = point.ok ? 1 : 0;
  });
  for (const auto& row : t.rows)
    t.max_rel_tol_achieved = std::max(t.max_rel_tol_achieved, row[2]);

  ScenarioRun run;
  run.tables.push_back(std::move(t));
  run.exit_code = run.tables[0].any_unconverged() ? 2 : 0;
  return run;
}

}  // namespace detail

/// Compute all tables of a resolved scenario (no file output).
inline ScenarioRun compute_scenario(const ResolvedScenario& sc) {
  if (sc.name == "fig1b") {
    ScenarioRun run;
    run.tables.push_back(detail::polariton_table(sc));
    return run;
  }
  if (sc.name == "fig1d") return detail::integrand_tables(sc);
  if (sc.name == "fig1e") return detail::coupling_sweep(sc, false);
  if (sc.name == "fig2a") return detail::coupling_sweep(sc, true);
  if (sc.name == "fig2b") return detail::length_shift_sweep(sc);
  if (sc.name == "fig2c") return detail::gold_merging_sweep(sc);
  if (sc.name == "fig2d") return detail::temperature_shift_sweep(sc);
  if (sc.name == "fig3a") return detail::water_cavity_sweep(sc);
  if (sc.name == "fig3b") return detail::per_molecule_sweep(sc);
  if (sc.name == "custom") return detail::generic_sweep(sc);
  throw ConfigError("scenario", "unknown scenario '" + sc.name + "'");
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out;
}

}  // namespace detail

inline void write_table_csv(std::ostream& out, const Table& table,
                            const ResolvedScenario& sc) {
  out << "# cavity " << version_string << "\n";
  out << "# scenario: " << sc.name << "\n";
  if (!table.name.empty()) out << "# table: " << table.name << "\n";
  for (const auto& [key, value] : sc.resolved.items())
    out << "# config." << key << ": " << value << "\n";
  for (const auto& note : sc.assumed) out << "# assumed: " << note << "\n";
  if (table.max_rel_tol_achieved > 0.0)
    out << "# rel_tol_achieved_max: " << detail::format_full(table.max_rel_tol_achieved)
        << "\n";
  const bool warn = table.any_unconverged();
  if (warn) out << "# status: partial_results\n";

  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  if (warn) out << ",warning";
  out << "\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << detail::format_full(row[i]);
    if (warn) out << "," << (table.row_ok[r] ? "ok" : "unconverged");
    out << "\n";
  }
}

inline void write_table_json(std::ostream& out, const Table& table,
                             const ResolvedScenario& sc) {
  out << "{\n  \"tool\": \"cavity\",\n  \"version\": \"" << version_string << "\",\n";
  out << "  \"scenario\": \"" << detail::json_escape(sc.name) << "\",\n";
  if (!table.name.empty())
    out << "  \"table\": \"" << detail::json_escape(table.name) << "\",\n";
  out << "  \"config\": {";
  bool first = true;
  for (const auto& [key, value] : sc.resolved.items()) {
    out << (first ? "\n" : ",\n") << "    \"" << detail::json_escape(key) << "\": \""
        << detail::json_escape(value) << "\"";
    first = false;
  }
  out << "\n  },\n  \"assumed\": [";
  for (std::size_t i = 0; i < sc.assumed.size(); ++i)
    out << (i ? ", " : "") << "\"" << detail::json_escape(sc.assumed[i]) << "\"";
  out << "],\n";
  out << "  \"rel_tol_achieved_max\": " << detail::format_full(table.max_rel_tol_achieved)
      << ",\n";
  out << "  \"partial_results\": " << (table.any_unconverged() ? "true" : "false")
      << ",\n  \"columns\": [";
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? ", " : "") << "\"" << detail::json_escape(table.columns[i]) << "\"";
  out << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? ",\n    " : "\n    ") << "[";
    for (std::size_t i = 0; i < table.rows[r].size(); ++i)
      out << (i ? ", " : "") << detail::format_full(table.rows[r][i]);
    out << "]";
  }
  out << "\n  ]\n}\n";
}

/// Single energy result as JSON, with the resolved configuration echoed.
inline void write_energy_json(std::ostream& out, const EnergyResult& result,
                              const ResolvedScenario& sc, bool converged = true) {
  out << "{\n  \"tool\": \"cavity\",\n  \"version\": \"" << version_string << "\",\n";
  out << "  \"config\": {";
  bool first = true;
  for (const auto& [key, value] : sc.resolved.items()) {
    out << (first ? "\n" : ",\n") << "    \"" << detail::json_escape(key) << "\": \""
        << detail::json_escape(value) << "\"";
    first = false;
  }
  out << "\n  },\n";
  out << "  \"u_per_area\": " << detail::format_full(result.u_per_area) << ",\n";
  out << "  \"rel_tol_achieved\": " << detail::format_full(result.rel_tol_achieved)
      << ",\n";
  out << "  \"matsubara_terms_used\": " << result.matsubara_terms_used << ",\n";
  out << "  \"converged\": " << (converged ? "true" : "false") << "\n}\n";
}

/// Recorded integrand samples as two CSV columns.
inline void write_integrand_csv(std::ostream& out, const EnergyResult& result) {
  out << "xi_rad_per_s,U_xi\n";
  for (const XiSample& sample : result.xi_integrand_samples)
    out << detail::format_full(sample.xi) << "," << detail::format_full(sample.u_xi)
        << "\n";
}

/// Output file path for one table: stem, optional table suffix, extension;
/// relative stems land in CAVITY_OUTPUT_DIR when that is set.
inline std::filesystem::path table_path(const ResolvedScenario& sc, const Table& table) {
  std::filesystem::path stem(sc.output_stem);
  if (stem.is_relative()) {
    if (const char* dir = std::getenv("CAVITY_OUTPUT_DIR"); dir && *dir)
      stem = std::filesystem::path(dir) / stem;
  }
  std::string file = stem.filename().string();
  if (!table.name.empty()) file += "_" + table.name;
  file += sc.json_output ? ".json" : ".csv";
  return stem.parent_path() / file;
}

/// Compute a scenario and write its tables; returns the process exit code
/// (0 success, 2 partial results written with a warning column).
inline int run_scenario(const ResolvedScenario& sc, std::ostream& log = std::cerr) {
  const ScenarioRun run = compute_scenario(sc);
  for (const Table& table : run.tables) {
    const std::filesystem::path path = table_path(sc, table);
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("output.path", "cannot write '" + path.string() + "'");
    if (sc.json_output)
      write_table_json(out, table, sc);
    else
      write_table_csv(out, table, sc);
    log << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
  }
  if (run.exit_code == 2)
    log << "warning: some points did not converge; partial results carry a warning column\n";
  return run.exit_code;
}

// ---------------------------------------------------------------------------
// pressure helper
// ---------------------------------------------------------------------------

struct PressureResult {
  double pressure = 0.0;           // central difference at step dL, J/m^3
  double pressure_half_step = 0.0; // same at dL/2
  double richardson = 0.0;         // second-order extrapolation of the two
  double error_estimate = 0.0;
};

/// -dU/dL by central differences with a Richardson consistency check.
inline PressureResult pressure_finite_difference(const CavityConfig& cfg, double dl,
                                                 const QuadratureSpec& spec = {}) {
  cfg.validate();
  if (!(dl > 0.0) || !(dl < cfg.gap_length))
    throw std::invalid_argument("pressure: need 0 < dL < L");
  auto energy_at = [&](double length) {
    CavityConfig point = cfg;
    point.gap_length = length;
    return (point.temperature == 0.0 ? casimir_energy_T0(point, spec)
                                     : free_energy_T(point, spec))
        .u_per_area;
  };
  auto central = [&](double h) {
    return -(energy_at(cfg.gap_length + h) - energy_at(cfg.gap_length - h)) / (2.0 * h);
  };
  PressureResult out;
  out.pressure = central(dl);
  out.pressure_half_step = central(0.5 * dl);
  out.richardson = (4.0 * out.pressure_half_step - out.pressure) / 3.0;
  out.error_estimate = std::abs(out.richardson - out.pressure_half_step);
  return out;
}

}  // namespace cavity
