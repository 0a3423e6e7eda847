#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cavity/constants.hpp"
#include "cavity/dielectric.hpp"
#include "cavity/fresnel.hpp"
#include "cavity/lifshitz.hpp"

// Scenario configuration: a flat "key: value" text format with dotted key
// paths and unit suffixes, e.g.
//
//   scenario: fig2a
//   cavity.L: 100 nm
//   cavity.gap.omega0: 1 omega_L
//   cavity.gap.g: 0.5 omega0
//   cavity.mirror.top: gold 30 nm, glass inf
//
// Frequencies accept eV, rad/s, or the relative units omega0 / omega_L;
// relative units are resolved once at load time against the base cavity, so
// sweeping L afterwards keeps omega0 fixed.

namespace cavity {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config error at '" + field + "': " + message),
        field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Ordered key -> raw string map; later set() calls overwrite values but keep
/// the original position, so the resolved echo is stable.
class ConfigMap {
 public:
  static ConfigMap from_string(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto colon = trimmed.find(':');
      if (colon == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no),
                          "expected 'key: value', got '" + trimmed + "'");
      const std::string key = trim(trimmed.substr(0, colon));
      const std::string value = trim(trimmed.substr(colon + 1));
      if (key.empty())
        throw ConfigError("line " + std::to_string(line_no), "empty key");
      cfg.set(key, value);
    }
    return cfg;
  }

  static ConfigMap from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
  }

  void set(const std::string& key, const std::string& value) {
    if (kv_.find(key) == kv_.end()) order_.push_back(key);
    kv_[key] = value;
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  const std::string& get(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(key, "missing required key");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  /// Overrides win; keys new to this map are appended in override order.
  void merge_over(const ConfigMap& overrides) {
    for (const auto& key : overrides.order_) set(key, overrides.kv_.at(key));
  }

  std::vector<std::pair<std::string, std::string>> items() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(order_.size());
    for (const auto& key : order_) out.emplace_back(key, kv_.at(key));
    return out;
  }

  /// Keys below a dotted prefix, e.g. prefix "material" yields "gold.kind"...
  std::vector<std::string> keys_below(const std::string& prefix) const {
    std::vector<std::string> out;
    const std::string dotted = prefix + ".";
    for (const auto& key : order_)
      if (key.rfind(dotted, 0) == 0) out.push_back(key.substr(dotted.size()));
    return out;
  }

  static std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string> kv_;
};

namespace detail {

// "0.5 omega0", "100nm", "9.02 eV" -> number + unit token (possibly empty)
inline std::pair<double, std::string> split_number_unit(const std::string& raw,
                                                        const std::string& field) {
  const std::string s = ConfigMap::trim(raw);
  if (s.empty()) throw ConfigError(field, "empty value");
  // bare unit token means 1 of that unit, e.g. "omega_L"
  std::size_t pos = 0;
  double number = 1.0;
  if (std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '+' || s[0] == '-' ||
      s[0] == '.') {
    try {
      number = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw ConfigError(field, "cannot parse number in '" + raw + "'");
    }
  }
  std::string unit = ConfigMap::trim(s.substr(pos));
  return {number, unit};
}

}  // namespace detail

inline double parse_number(const std::string& raw, const std::string& field) {
  const auto [value, unit] = detail::split_number_unit(raw, field);
  if (!unit.empty()) throw ConfigError(field, "unexpected unit '" + unit + "'");
  return value;
}

inline double parse_length(const std::string& raw, const std::string& field) {
  const auto [value, unit] = detail::split_number_unit(raw, field);
  if (unit == "nm") return value * 1e-9;
  if (unit == "um") return value * 1e-6;
  if (unit == "mm") return value * 1e-3;
  if (unit == "m" || unit.empty()) return value;
  throw ConfigError(field, "unknown length unit '" + unit + "'");
}

inline double parse_temperature(const std::string& raw, const std::string& field) {
  const auto [value, unit] = detail::split_number_unit(raw, field);
  if (unit == "K" || unit.empty()) return value;
  throw ConfigError(field, "unknown temperature unit '" + unit + "'");
}

/// Angular frequency in rad/s. omega0_ref / omega_L_ref anchor the relative
/// units; pass NaN when the reference is not available in context.
inline double parse_frequency(const std::string& raw, const std::string& field,
                              double omega0_ref, double omega_L_ref) {
  const auto [value, unit] = detail::split_number_unit(raw, field);
  if (unit == "eV") return ev_to_rad_s(value);
  if (unit == "meV") return ev_to_rad_s(1e-3 * value);
  if (unit == "rad/s" || unit == "rads" || unit.empty()) return value;
  if (unit == "omega0" || unit == "omega_0") {
    if (!(omega0_ref > 0.0)) throw ConfigError(field, "no omega0 reference in scope");
    return value * omega0_ref;
  }
  if (unit == "omega_L" || unit == "omegaL") {
    if (!(omega_L_ref > 0.0)) throw ConfigError(field, "no omega_L reference in scope");
    return value * omega_L_ref;
  }
  throw ConfigError(field, "unknown frequency unit '" + unit + "'");
}

inline int parse_int(const std::string& raw, const std::string& field) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(raw, &pos);
    if (ConfigMap::trim(raw.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(field, "cannot parse integer '" + raw + "'");
}

/// Built-in material library; user definitions under material.<name>.* extend
/// or override it.
inline DielectricModel resolve_material(const std::string& name, const ConfigMap& cfg,
                                        const std::string& field) {
  const std::string prefix = "material." + name + ".";
  if (cfg.has(prefix + "kind")) {
    const std::string kind = cfg.get(prefix + "kind");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (kind == "pec") return PerfectConductor{};
    if (kind == "constant")
      return ConstantDielectric{parse_number(cfg.get(prefix + "eps"), prefix + "eps")};
    if (kind == "drude")
      return DrudeMetal{
          parse_frequency(cfg.get(prefix + "omega_p"), prefix + "omega_p", nan, nan),
          parse_frequency(cfg.get(prefix + "gamma"), prefix + "gamma", nan, nan)};
    if (kind == "lorentz") {
      LorentzMedium m;
      m.omega0 = parse_frequency(cfg.get(prefix + "omega0"), prefix + "omega0", nan, nan);
      m.g = parse_frequency(cfg.get_or(prefix + "g", "0"), prefix + "g", m.omega0, nan);
      m.gamma =
          parse_frequency(cfg.get_or(prefix + "gamma", "0"), prefix + "gamma", m.omega0, nan);
      m.eps_inf = parse_number(cfg.get_or(prefix + "eps_inf", "1"), prefix + "eps_inf");
      return m;
    }
    throw ConfigError(prefix + "kind", "unknown material kind '" + kind + "'");
  }
  if (name == "pec") return PerfectConductor{};
  if (name == "vacuum") return ConstantDielectric{1.0};
  if (name == "glass") return ConstantDielectric{2.1};
  if (name == "water") return ConstantDielectric{1.77};
  if (name == "gold") return DrudeMetal{ev_to_rad_s(9.02), ev_to_rad_s(0.0265)};
  throw ConfigError(field, "unknown material '" + name + "'");
}

/// "gold 30 nm, glass inf" -> ordered stack, gap-adjacent first.
inline MirrorStack parse_stack(const std::string& raw, const ConfigMap& cfg,
                               const std::string& field) {
  MirrorStack stack;
  std::istringstream in(raw);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = ConfigMap::trim(part);
    if (part.empty()) continue;
    std::istringstream tokens(part);
    std::string name;
    tokens >> name;
    std::string rest;
    std::getline(tokens, rest);
    rest = ConfigMap::trim(rest);
    Layer layer;
    layer.material = resolve_material(name, cfg, field);
    if (rest.empty() || rest == "inf")
      layer.thickness = half_space;
    else
      layer.thickness = parse_length(rest, field);
    stack.layers.push_back(std::move(layer));
  }
  if (stack.layers.empty()) throw ConfigError(field, "empty mirror stack");
  try {
    stack.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(field, err.what());
  }
  return stack;
}

/// Fully resolved scenario: base cavity, frequency references, sweep grid,
/// quadrature and output choices, plus the merged key-value echo.
struct ResolvedScenario {
  std::string name = "custom";
  CavityConfig cavity;
  double omega0 = 0.0;   // gap resonance reference, rad/s (0 when none)
  double omega_L = 0.0;  // pi c / L of the base cavity
  QuadratureSpec quad;
  std::string sweep_variable;  // empty -> single point
  std::vector<double> sweep_values;
  std::string output_stem;
  bool json_output = false;
  int threads = 1;
  ConfigMap resolved;
  std::vector<std::string> assumed;
};

namespace detail {

inline std::vector<double> make_grid(double from, double to, int points,
                                     const std::string& scale, const std::string& field) {
  if (points < 1) throw ConfigError(field, "sweep needs at least one point");
  std::vector<double> grid;
  grid.reserve(points);
  if (points == 1) {
    grid.push_back(from);
    return grid;
  }
  if (scale == "log") {
    if (!(from > 0.0) || !(to > 0.0))
      throw ConfigError(field, "log sweep needs positive endpoints");
    const double lf = std::log(from), lt = std::log(to);
    for (int i = 0; i < points; ++i)
      grid.push_back(std::exp(lf + (lt - lf) * i / (points - 1)));
  } else if (scale == "linear") {
    for (int i = 0; i < points; ++i)
      grid.push_back(from + (to - from) * i / (points - 1));
  } else {
    throw ConfigError(field, "unknown sweep scale '" + scale + "'");
  }
  return grid;
}

}  // namespace detail

/// Turn a merged ConfigMap into a ResolvedScenario. Throws ConfigError with
/// the offending field path on malformed input.
inline ResolvedScenario resolve_scenario(const ConfigMap& cfg) {
  ResolvedScenario sc;
  sc.resolved = cfg;
  sc.name = cfg.get_or("scenario", "custom");

  const double nan = std::numeric_limits<double>::quiet_NaN();

  // cavity geometry first: omega_L anchors the relative frequency units
  sc.cavity.gap_length = parse_length(cfg.get("cavity.L"), "cavity.L");
  if (!(sc.cavity.gap_length > 0.0)) throw ConfigError("cavity.L", "must be > 0");
  sc.omega_L = omega_fundamental(sc.cavity.gap_length);
  sc.cavity.temperature = parse_temperature(cfg.get_or("cavity.T", "0"), "cavity.T");
  if (sc.cavity.temperature < 0.0) throw ConfigError("cavity.T", "must be >= 0");

  // gap medium: background + optional resonance
  const double background =
      parse_number(cfg.get_or("cavity.gap.background", "1"), "cavity.gap.background");
  if (background < 1.0) throw ConfigError("cavity.gap.background", "must be >= 1");
  if (cfg.has("cavity.gap.omega0")) {
    LorentzMedium gap;
    gap.eps_inf = background;
    gap.omega0 = parse_frequency(cfg.get("cavity.gap.omega0"), "cavity.gap.omega0", nan,
                                 sc.omega_L);
    if (!(gap.omega0 > 0.0)) throw ConfigError("cavity.gap.omega0", "must be > 0");
    sc.omega0 = gap.omega0;
    gap.g = parse_frequency(cfg.get_or("cavity.gap.g", "0"), "cavity.gap.g", sc.omega0,
                            sc.omega_L);
    if (gap.g < 0.0) throw ConfigError("cavity.gap.g", "must be >= 0");
    gap.gamma = parse_frequency(cfg.get_or("cavity.gap.gamma", "0"), "cavity.gap.gamma",
                                sc.omega0, sc.omega_L);
    if (gap.gamma < 0.0) throw ConfigError("cavity.gap.gamma", "must be >= 0");
    sc.cavity.gap = gap;
  } else {
    sc.cavity.gap = ConstantDielectric{background};
  }

  sc.cavity.top = parse_stack(cfg.get_or("cavity.mirror.top", "pec"), cfg,
                              "cavity.mirror.top");
  sc.cavity.bottom =
      cfg.has("cavity.mirror.bottom")
          ? parse_stack(cfg.get("cavity.mirror.bottom"), cfg, "cavity.mirror.bottom")
          : sc.cavity.top;
  try {
    sc.cavity.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError("cavity", err.what());
  }

  sc.quad.rel_tol = parse_number(cfg.get_or("quadrature.rel_tol", "1e-8"),
                                 "quadrature.rel_tol");
  sc.quad.max_subdivisions = parse_int(
      cfg.get_or("quadrature.max_subdivisions", "4000"), "quadrature.max_subdivisions");
  sc.quad.matsubara_rel_cutoff =
      parse_number(cfg.get_or("quadrature.matsubara_rel_cutoff", "1e-10"),
                   "quadrature.matsubara_rel_cutoff");
  try {
    sc.quad.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError("quadrature", err.what());
  }

  if (cfg.has("sweep.variable")) {
    sc.sweep_variable = cfg.get("sweep.variable");
    static const char* known[] = {"g", "L", "T", "omega0", "gamma"};
    bool ok = false;
    for (const char* k : known) ok = ok || sc.sweep_variable == k;
    if (!ok)
      throw ConfigError("sweep.variable",
                        "'" + sc.sweep_variable + "' does not name a config field "
                        "(expected g, L, T, omega0 or gamma)");
    auto parse_sweep_value = [&](const std::string& raw, const std::string& field) {
      if (sc.sweep_variable == "L") return parse_length(raw, field);
      if (sc.sweep_variable == "T") return parse_temperature(raw, field);
      return parse_frequency(raw, field, sc.omega0 > 0.0 ? sc.omega0 : nan, sc.omega_L);
    };
    if (cfg.has("sweep.values")) {
      std::istringstream in(cfg.get("sweep.values"));
      std::string part;
      while (std::getline(in, part, ','))
        sc.sweep_values.push_back(
            parse_sweep_value(ConfigMap::trim(part), "sweep.values"));
    } else {
      const double from = parse_sweep_value(cfg.get("sweep.from"), "sweep.from");
      const double to = parse_sweep_value(cfg.get("sweep.to"), "sweep.to");
      const int points = parse_int(cfg.get_or("sweep.points", "21"), "sweep.points");
      sc.sweep_values = detail::make_grid(from, to, points,
                                          cfg.get_or("sweep.scale", "linear"),
                                          "sweep.scale");
    }
    if (sc.sweep_values.empty()) throw ConfigError("sweep.values", "empty sweep grid");
  }

  sc.output_stem = cfg.get_or("output.path", sc.name);
  const std::string format = cfg.get_or("output.format", "csv");
  if (format == "json")
    sc.json_output = true;
  else if (format != "csv")
    throw ConfigError("output.format", "expected csv or json");
  sc.threads = parse_int(cfg.get_or("threads", "1"), "threads");
  if (sc.threads < 1) throw ConfigError("threads", "must be >= 1");

  return sc;
}

/// Apply one sweep-variable value to a copy of the base cavity.
inline CavityConfig cavity_with(const ResolvedScenario& sc, const std::string& var,
                                double value) {
  CavityConfig cfg = sc.cavity;
  if (var == "L") {
    cfg.gap_length = value;
    return cfg;
  }
  if (var == "T") {
    cfg.temperature = value;
    return cfg;
  }
  auto* lor = std::get_if<LorentzMedium>(&cfg.gap);
  if (!lor)
    throw ConfigError("sweep.variable", "'" + var + "' needs a resonant gap medium");
  if (var == "g")
    lor->g = value;
  else if (var == "omega0")
    lor->omega0 = value;
  else if (var == "gamma")
    lor->gamma = value;
  else
    throw ConfigError("sweep.variable", "unknown variable '" + var + "'");
  return cfg;
}

}  // namespace cavity
