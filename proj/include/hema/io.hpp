#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hema/errors.hpp"
#include "hema/flight_dynamics.hpp"
#include "hema/scheduling.hpp"
#include "hema/units.hpp"

namespace hema::io {

/// Shortest decimal form that round-trips; identical output for identical doubles.
inline std::string fmt(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    fail(ErrorKind::Config, where + ": cannot parse number '" + s + "'");
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

/// Simple CSV table: header names and numeric rows. '#' starts a comment line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvTable parse_csv(const std::string& text, const std::string& source) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto l = trim(line);
    if (l.empty() || l[0] == '#') continue;
    auto cells = split(l, ',');
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    const std::string where = source + ":" + std::to_string(lineno);
    if (cells.size() != t.header.size())
      fail(ErrorKind::Config, where + ": expected " + std::to_string(t.header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, where));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) fail(ErrorKind::Config, source + ": missing header");
  return t;
}

inline void require_columns(const CsvTable& t, std::initializer_list<std::string_view> names,
                            const std::string& source) {
  for (auto n : names)
    if (t.column(n) < 0) fail(ErrorKind::Config, source + ": missing column '" + std::string(n) + "'");
}

/**
 * @brief Flight plan from CSV `t_s,h_m,v_mps[,gamma_rad]`.
 *
 * Samples must be uniformly spaced; the spacing becomes the plan's delta. When gamma is absent
 * it is derived from the altitude history.
 */
inline FlightPlan parse_flight_plan(const std::string& text, const std::string& source = "flight plan") {
  const auto t = parse_csv(text, source);
  require_columns(t, {"t_s", "h_m", "v_mps"}, source);
  const int ct = t.column("t_s"), ch = t.column("h_m"), cv = t.column("v_mps"), cg = t.column("gamma_rad");
  if (t.rows.size() < 2) fail(ErrorKind::Config, source + ": need at least two samples");
  FlightPlan plan;
  plan.delta = t.rows[1][ct] - t.rows[0][ct];
  if (!(plan.delta > 0.0)) fail(ErrorKind::Config, source + ": time must increase");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const double expected = t.rows[0][ct] + plan.delta * static_cast<double>(i);
    if (std::abs(r[ct] - expected) > 1e-6 * std::max(1.0, plan.delta))
      fail(ErrorKind::Config, source + ": non-uniform sampling at row " + std::to_string(i + 1));
    FlightPoint p;
    p.h = r[ch];
    p.v = r[cv];
    p.gamma = cg >= 0 ? r[cg] : 0.0;
    plan.steps.push_back(p);
  }
  if (cg < 0) derive_flight_path_angles(plan);
  try {
    plan.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, source + ": " + e.what());
  }
  return plan;
}

inline FlightPlan load_flight_plan(const std::filesystem::path& path) {
  return parse_flight_plan(read_file(path), path.string());
}

/// Linear resampling of altitude and speed at a new interval; gamma is re-derived.
inline FlightPlan resample(const FlightPlan& plan, double delta) {
  require(delta > 0.0, ErrorKind::Config, "resample: delta must be positive");
  const double T = plan.duration();
  const double steps = T / delta;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    fail(ErrorKind::Config, "resample: mission duration is not a multiple of the new delta");
  const auto n = static_cast<std::size_t>(std::llround(steps));
  FlightPlan out;
  out.delta = delta;
  out.steps.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double pos = std::min(static_cast<double>(k) * delta / plan.delta, static_cast<double>(plan.stages()));
    const auto lo = std::min(static_cast<std::size_t>(pos), plan.stages() - 1);
    const double f = pos - static_cast<double>(lo);
    const auto& a = plan.steps[lo];
    const auto& b = plan.steps[lo + 1];
    out.steps[k].h = std::lerp(a.h, b.h, f);
    out.steps[k].v = std::lerp(a.v, b.v, f);
  }
  derive_flight_path_angles(out);
  return out;
}

inline std::string format_flight_plan(const FlightPlan& plan) {
  std::string s = "t_s,h_m,v_mps,gamma_rad\n";
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const auto& p = plan.steps[k];
    s += fmt(plan.delta * static_cast<double>(k)) + "," + fmt(p.h) + "," + fmt(p.v) + "," + fmt(p.gamma) + "\n";
  }
  return s;
}

/// Fan map from CSV `h_m,p_drv_MW,Omega` covering a full rectangular grid (any row order).
inline FanMap parse_fan_map(const std::string& text, const std::string& source = "fan map",
                            double mach = 0.55, double cp = 1000.0) {
  const auto t = parse_csv(text, source);
  require_columns(t, {"h_m", "p_drv_MW", "Omega"}, source);
  const int ch = t.column("h_m"), cp_ = t.column("p_drv_MW"), co = t.column("Omega");
  std::map<double, std::map<double, double>> grid;
  for (const auto& r : t.rows) {
    auto [it, fresh] = grid[r[ch]].emplace(units::MW(r[cp_]), r[co]);
    if (!fresh) fail(ErrorKind::Config, source + ": duplicate grid point");
  }
  FanMap map;
  map.mach = mach;
  map.cp = cp;
  if (grid.empty()) fail(ErrorKind::Config, source + ": no data");
  for (const auto& [p, _] : grid.begin()->second) map.powers.push_back(p);
  for (const auto& [h, row] : grid) {
    map.altitudes.push_back(h);
    if (row.size() != map.powers.size()) fail(ErrorKind::Config, source + ": grid is not rectangular");
    std::size_t k = 0;
    for (const auto& [p, om] : row) {
      if (p != map.powers[k++]) fail(ErrorKind::Config, source + ": grid is not rectangular");
      map.omega.push_back(om);
    }
  }
  try {
    map.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, source + ": " + e.what());
  }
  return map;
}

inline std::string format_fan_map(const FanMap& map) {
  std::string s = "h_m,p_drv_MW,Omega\n";
  for (std::size_t ia = 0; ia < map.altitudes.size(); ++ia)
    for (std::size_t ip = 0; ip < map.powers.size(); ++ip)
      s += fmt(map.altitudes[ia]) + "," + fmt(units::to_MW(map.powers[ip])) + "," + fmt(map.at(ia, ip)) + "\n";
  return s;
}

/// Coefficient table from CSV `omega_radps,kappa2,kappa1,kappa0,beta2,beta1,beta0` (SI).
inline CoeffTable parse_coeff_table(const std::string& text, const std::string& source = "coefficient table") {
  const auto t = parse_csv(text, source);
  require_columns(t, {"omega_radps", "kappa2", "kappa1", "kappa0", "beta2", "beta1", "beta0"}, source);
  CoeffTable table;
  for (const auto& r : t.rows) {
    CoeffRow row;
    row.omega = r[t.column("omega_radps")];
    row.loss = {r[t.column("kappa2")], r[t.column("kappa1")], r[t.column("kappa0")]};
    row.fuel = {r[t.column("beta2")], r[t.column("beta1")], r[t.column("beta0")]};
    table.rows.push_back(row);
  }
  try {
    table.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, source + ": " + e.what());
  }
  return table;
}

inline std::string format_coeff_table(const CoeffTable& table) {
  std::string s = "omega_radps,kappa2,kappa1,kappa0,beta2,beta1,beta0\n";
  for (const auto& r : table.rows)
    s += fmt(r.omega) + "," + fmt(r.loss.kappa2) + "," + fmt(r.loss.kappa1) + "," + fmt(r.loss.kappa0) + "," +
         fmt(r.fuel.beta2) + "," + fmt(r.fuel.beta1) + "," + fmt(r.fuel.beta0) + "\n";
  return s;
}

}  // namespace hema::io
