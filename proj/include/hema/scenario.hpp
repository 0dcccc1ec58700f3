#pragma once

#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hema/control.hpp"
#include "hema/errors.hpp"
#include "hema/io.hpp"
#include "hema/synthetic.hpp"
#include "hema/units.hpp"

namespace hema {

/**
 * @brief A mission experiment: plan, maps, aircraft parameters and strategy settings.
 *
 * Loaded from a `key = value` file; key names carry their units. File paths are resolved
 * relative to the scenario file. Missing map files fall back to the bundled synthetic maps.
 */
struct Scenario {
  std::string name;
  std::filesystem::path source;
  FlightPlan plan;
  MissionParams params;
  double lambda = 0.0;                        ///< kg/J
  std::optional<double> target_mass_change;   ///< fraction of m0 burnt by CDCS (fuel-scale calibration)
  double fuel_scale = 1.0;
  OcpTolerances tol;
};

namespace scenario_detail {

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "scenario.name",
      "battery.U_V", "battery.R_ohm", "battery.E_min_MJ", "battery.E_max_MJ",
      "limits.p_gt_min_MW", "limits.p_gt_max_MW", "limits.p_em_min_MW", "limits.p_em_max_MW",
      "aero.a0", "aero.a1_per_deg", "aero.a2_per_deg2", "aero.b0", "aero.b1_per_deg", "aero.S_m2",
      "aero.rho_kg_m3", "aero.g_mps2", "aero.alpha_min_deg", "aero.alpha_max_deg", "aero.n_arrangements",
      "aero.use_isa_density",
      "mission.m0_kg", "mission.dry_mass_kg", "mission.E0_MJ", "mission.delta_s",
      "fan.mach", "fan.cp_J_per_kgK",
      "files.flight_plan", "files.fan_map", "files.coefficients",
      "strategy.lambda_kg_per_MJ", "strategy.target_mass_change", "strategy.fuel_scale",
      "solver.feas_tol", "solver.opt_tol", "solver.max_iterations",
  };
  return keys;
}

inline const std::set<std::string>& required_keys() {
  static const std::set<std::string> keys = {
      "battery.U_V", "battery.R_ohm", "battery.E_min_MJ", "battery.E_max_MJ",
      "limits.p_gt_min_MW", "limits.p_gt_max_MW", "limits.p_em_min_MW", "limits.p_em_max_MW",
      "mission.m0_kg",
  };
  return keys;
}

}  // namespace scenario_detail

/// Parsed `key = value` pairs; '#' starts a comment.
inline std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto l = io::trim(line);
    if (l.empty()) continue;
    const auto eq = l.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) fail(ErrorKind::Config, where + ": expected 'key = value'");
    auto key = io::trim(std::string_view(l).substr(0, eq));
    auto value = io::trim(std::string_view(l).substr(eq + 1));
    if (!scenario_detail::known_keys().count(key)) fail(ErrorKind::Config, where + ": unknown key '" + key + "'");
    if (value.empty()) fail(ErrorKind::Config, where + ": empty value for '" + key + "'");
    if (!kv.emplace(key, value).second) fail(ErrorKind::Config, where + ": duplicate key '" + key + "'");
  }
  for (const auto& k : scenario_detail::required_keys())
    if (!kv.count(k)) fail(ErrorKind::Config, source + ": missing required key '" + k + "'");
  return kv;
}

inline Scenario parse_scenario(const std::string& text, const std::filesystem::path& source,
                               std::optional<double> delta_override = std::nullopt) {
  const auto src = source.string();
  const auto kv = parse_key_values(text, src);
  auto num = [&](const std::string& key, double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : io::parse_double(it->second, src + " [" + key + "]");
  };
  auto has = [&](const std::string& key) { return kv.count(key) > 0; };
  auto path_of = [&](const std::string& key) -> std::optional<std::filesystem::path> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::filesystem::path p(it->second);
    return p.is_absolute() ? p : source.parent_path() / p;
  };

  Scenario s;
  s.source = source;
  s.name = has("scenario.name") ? kv.at("scenario.name") : source.stem().string();

  auto& b = s.params.battery;
  b.U = num("battery.U_V", 0.0);
  b.R = num("battery.R_ohm", 0.0);
  b.E_min = units::MJ(num("battery.E_min_MJ", 0.0));
  b.E_max = units::MJ(num("battery.E_max_MJ", 0.0));
  if (!b.valid()) fail(ErrorKind::Config, src + ": battery needs U > 0, R > 0 and E_min < E_max");

  auto& l = s.params.limits;
  l.p_gt_min = units::MW(num("limits.p_gt_min_MW", 0.0));
  l.p_gt_max = units::MW(num("limits.p_gt_max_MW", 0.0));
  l.p_em_min = units::MW(num("limits.p_em_min_MW", 0.0));
  l.p_em_max = units::MW(num("limits.p_em_max_MW", 0.0));
  if (!(l.p_gt_min < l.p_gt_max) || !(l.p_em_min <= 0.0) || !(l.p_em_max > 0.0))
    fail(ErrorKind::Config, src + ": limits need p_gt_min < p_gt_max and p_em_min <= 0 < p_em_max");

  auto& a = s.params.aero;
  a.a0 = num("aero.a0", a.a0);
  a.a1 = num("aero.a1_per_deg", a.a1);
  a.a2 = num("aero.a2_per_deg2", a.a2);
  a.b0 = num("aero.b0", a.b0);
  a.b1 = num("aero.b1_per_deg", a.b1);
  a.S = num("aero.S_m2", a.S);
  a.rho = num("aero.rho_kg_m3", a.rho);
  a.grav = num("aero.g_mps2", a.grav);
  a.alpha_min = num("aero.alpha_min_deg", a.alpha_min);
  a.alpha_max = num("aero.alpha_max_deg", a.alpha_max);
  const double n = num("aero.n_arrangements", a.n_arrangements);
  if (n < 1.0 || n != std::floor(n)) fail(ErrorKind::Config, src + ": aero.n_arrangements must be a positive integer");
  a.n_arrangements = static_cast<int>(n);
  if (has("aero.use_isa_density")) {
    const auto& v = kv.at("aero.use_isa_density");
    if (v != "true" && v != "false") fail(ErrorKind::Config, src + ": aero.use_isa_density must be true or false");
    a.use_isa_density = v == "true";
  }
  if (!a.valid()) fail(ErrorKind::Config, src + ": aerodynamic parameters invalid");

  s.params.m0 = num("mission.m0_kg", 0.0);
  s.params.m_dry = num("mission.dry_mass_kg", 0.0);
  s.params.E0 = units::MJ(num("mission.E0_MJ", units::to_MJ(b.E_max)));
  if (!(s.params.m0 > s.params.m_dry) || s.params.m_dry < 0.0)
    fail(ErrorKind::Config, src + ": need m0_kg > dry_mass_kg >= 0");
  if (s.params.E0 < b.E_min || s.params.E0 > b.E_max)
    fail(ErrorKind::Config, src + ": mission.E0_MJ outside the battery SOC band");

  const double mach = num("fan.mach", 0.55);
  const double cp = num("fan.cp_J_per_kgK", 1000.0);
  if (auto p = path_of("files.flight_plan")) {
    s.plan = io::load_flight_plan(*p);
  } else {
    s.plan = synthetic::default_flight_plan();
  }
  const double delta = delta_override ? *delta_override : num("mission.delta_s", s.plan.delta);
  if (!(delta > 0.0)) fail(ErrorKind::Config, src + ": delta must be positive");
  if (delta != s.plan.delta) s.plan = io::resample(s.plan, delta);

  if (auto p = path_of("files.fan_map")) {
    s.params.maps.fan = io::parse_fan_map(io::read_file(*p), p->string(), mach, cp);
  } else {
    s.params.maps.fan = synthetic::fan_map();
    s.params.maps.fan.mach = mach;
    s.params.maps.fan.cp = cp;
  }
  if (auto p = path_of("files.coefficients")) {
    s.params.maps.table = io::parse_coeff_table(io::read_file(*p), p->string());
  } else {
    s.params.maps.table = synthetic::coeff_table();
  }

  s.lambda = units::kg_per_MJ(num("strategy.lambda_kg_per_MJ", 0.0));
  if (s.lambda < 0.0) fail(ErrorKind::Config, src + ": strategy.lambda_kg_per_MJ must be >= 0");
  if (has("strategy.target_mass_change")) {
    const double t = num("strategy.target_mass_change", 0.0);
    if (!(t > 0.0 && t < 1.0)) fail(ErrorKind::Config, src + ": strategy.target_mass_change must be in (0, 1)");
    if (has("strategy.fuel_scale")) fail(ErrorKind::Config, src + ": give either target_mass_change or fuel_scale");
    s.target_mass_change = t;
  }
  s.fuel_scale = num("strategy.fuel_scale", 1.0);
  if (!(s.fuel_scale > 0.0)) fail(ErrorKind::Config, src + ": strategy.fuel_scale must be positive");

  s.tol.feas = num("solver.feas_tol", s.tol.feas);
  s.tol.opt = num("solver.opt_tol", s.tol.opt);
  s.tol.max_iterations = static_cast<int>(num("solver.max_iterations", s.tol.max_iterations));
  if (!(s.tol.feas > 0.0 && s.tol.opt > 0.0 && s.tol.max_iterations > 0))
    fail(ErrorKind::Config, src + ": solver tolerances must be positive");
  return s;
}

/// Directories searched for `<name>.scn`: $HEMA_SCENARIO_DIR (colon separated), then the bundled set.
inline std::vector<std::filesystem::path> scenario_search_path() {
  std::vector<std::filesystem::path> dirs;
  if (const char* env = std::getenv("HEMA_SCENARIO_DIR")) {
    for (const auto& d : io::split(env, ':'))
      if (!d.empty()) dirs.emplace_back(d);
  }
#ifdef HEMA_DATA_DIR
  dirs.emplace_back(std::filesystem::path(HEMA_DATA_DIR) / "scenarios");
#endif
  return dirs;
}

/// Resolves a scenario given by name or path.
inline std::filesystem::path find_scenario(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  for (const auto& dir : scenario_search_path()) {
    const auto p = dir / (name_or_path + ".scn");
    if (std::filesystem::is_regular_file(p)) return p;
  }
  fail(ErrorKind::Config, "scenario '" + name_or_path + "' not found (set HEMA_SCENARIO_DIR or pass a path)");
}

inline Scenario load_scenario(const std::string& name_or_path, std::optional<double> delta_override = std::nullopt) {
  const auto path = find_scenario(name_or_path);
  return parse_scenario(io::read_file(path), path, delta_override);
}

/// Strategy settings for a scenario; resolves the heavy-fuel calibration when requested.
inline StrategyConfig strategy_config(const Scenario& s, Strategy strategy,
                                      std::optional<double> lambda_override = std::nullopt) {
  StrategyConfig cfg;
  cfg.strategy = strategy;
  cfg.lambda = lambda_override ? *lambda_override : s.lambda;
  cfg.tol = s.tol;
  cfg.fuel_scale = s.target_mass_change ? calibrate_fuel_scale(s.plan, s.params, cfg, *s.target_mass_change)
                                        : s.fuel_scale;
  return cfg;
}

}  // namespace hema
