#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hema/control.hpp"
#include "hema/errors.hpp"
#include "hema/io.hpp"
#include "hema/units.hpp"

namespace hema::report {

using json = nlohmann::ordered_json;

/// FNV-1a hash of the plan's canonical CSV form; identifies "the same plan" across runs.
inline std::string plan_id(const FlightPlan& plan) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : io::format_flight_plan(plan)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// One row per step. Wall-clock timings are left out so identical runs give identical bytes.
inline std::string log_csv(const MissionLog& log) {
  std::string s = "t_s,p_gt_W,p_em_W,p_b_W,p_drv_W,m_kg,E_J,alpha_deg,alpha_ok,omega_radps,status,iterations,horizon\n";
  for (const auto& r : log.steps) {
    s += io::fmt(r.t) + "," + io::fmt(r.p_gt) + "," + io::fmt(r.p_em) + "," + io::fmt(r.p_b) + "," +
         io::fmt(r.p_drv) + "," + io::fmt(r.m) + "," + io::fmt(r.E) + "," + io::fmt(r.alpha) + "," +
         (r.alpha_ok ? "1" : "0") + "," + io::fmt(r.omega) + "," + r.status + "," + std::to_string(r.iterations) +
         "," + std::to_string(r.horizon) + "\n";
  }
  return s;
}

/// Mission-level figures, either taken from a live log or read back from its JSON summary.
struct LogSummary {
  std::string scenario;
  std::string strategy;
  std::string plan;
  double delta = 0.0;
  int stages = 0;
  int n_arrangements = 1;
  double m0 = 0.0;
  double E0 = 0.0;
  double total_fuel = 0.0;  ///< kg
  double final_m = 0.0;
  double final_E = 0.0;     ///< J
  double min_E = 0.0;
  double max_E = 0.0;
  double max_abs_alpha = 0.0;
  int alpha_violations = 0;
  bool completed = false;
  std::string failure;
};

inline LogSummary summarize(const MissionLog& log, const FlightPlan& plan) {
  LogSummary s;
  s.scenario = log.scenario;
  s.strategy = to_string(log.strategy);
  s.plan = plan_id(plan);
  s.delta = log.delta;
  s.stages = static_cast<int>(plan.stages());
  s.n_arrangements = log.n_arrangements;
  s.m0 = log.m0;
  s.E0 = log.E0;
  s.total_fuel = log.m0 - log.summary.final_m;
  s.final_m = log.summary.final_m;
  s.final_E = log.summary.final_E;
  s.min_E = log.summary.min_E;
  s.max_E = log.summary.max_E;
  s.max_abs_alpha = log.summary.max_abs_alpha;
  s.alpha_violations = log.summary.alpha_violations;
  s.completed = log.summary.completed;
  s.failure = log.failure;
  return s;
}

inline json to_json(const LogSummary& s) {
  json j;
  j["scenario"] = s.scenario;
  j["strategy"] = s.strategy;
  j["plan_id"] = s.plan;
  j["delta_s"] = s.delta;
  j["stages"] = s.stages;
  j["n_arrangements"] = s.n_arrangements;
  j["m0_kg"] = s.m0;
  j["E0_MJ"] = units::to_MJ(s.E0);
  j["total_fuel_kg"] = s.total_fuel;
  j["final_mass_kg"] = s.final_m;
  j["final_soc_MJ"] = units::to_MJ(s.final_E);
  j["min_soc_MJ"] = units::to_MJ(s.min_E);
  j["max_soc_MJ"] = units::to_MJ(s.max_E);
  j["max_abs_alpha_deg"] = s.max_abs_alpha;
  j["alpha_violations"] = s.alpha_violations;
  j["completed"] = s.completed;
  j["failure"] = s.failure;
  return j;
}

inline LogSummary summary_from_json(const json& j, const std::string& source) {
  try {
    LogSummary s;
    s.scenario = j.at("scenario").get<std::string>();
    s.strategy = j.at("strategy").get<std::string>();
    s.plan = j.at("plan_id").get<std::string>();
    s.delta = j.at("delta_s").get<double>();
    s.stages = j.at("stages").get<int>();
    s.n_arrangements = j.at("n_arrangements").get<int>();
    s.m0 = j.at("m0_kg").get<double>();
    s.E0 = units::MJ(j.at("E0_MJ").get<double>());
    s.final_m = j.at("final_mass_kg").get<double>();
    s.total_fuel = s.m0 - s.final_m;
    s.final_E = units::MJ(j.at("final_soc_MJ").get<double>());
    s.min_E = units::MJ(j.at("min_soc_MJ").get<double>());
    s.max_E = units::MJ(j.at("max_soc_MJ").get<double>());
    s.max_abs_alpha = j.at("max_abs_alpha_deg").get<double>();
    s.alpha_violations = j.at("alpha_violations").get<int>();
    s.completed = j.at("completed").get<bool>();
    s.failure = j.at("failure").get<std::string>();
    return s;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, source + ": malformed mission summary (" + e.what() + ")");
  }
}

inline LogSummary load_summary(const std::filesystem::path& path) {
  const auto text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, path.string() + ": not valid JSON (" + e.what() + ")");
  }
  return summary_from_json(j, path.string());
}

/// Relative saving of `fuel` against `base_fuel`, in percent.
inline double saving_pct(double base_fuel, double fuel) { return 100.0 * (base_fuel - fuel) / base_fuel; }

struct SolveStats {
  int solves = 0;
  int horizon0 = 0;
  double mean_time = 0.0;  ///< s
  double max_time = 0.0;
  double total_time = 0.0;
  double mean_iterations = 0.0;
  int max_iterations = 0;
};

inline SolveStats solve_stats(const MissionLog& log) {
  SolveStats st;
  if (!log.steps.empty()) st.horizon0 = log.steps.front().horizon;
  for (const auto& r : log.steps) {
    if (log.strategy != Strategy::Mpc) continue;
    ++st.solves;
    st.total_time += r.solve_time;
    st.max_time = std::max(st.max_time, r.solve_time);
    st.mean_iterations += r.iterations;
    st.max_iterations = std::max(st.max_iterations, r.iterations);
  }
  if (st.solves > 0) {
    st.mean_time = st.total_time / st.solves;
    st.mean_iterations /= st.solves;
  }
  return st;
}

/// Run report: figures recomputed from the logs handed in.
struct RunReport {
  LogSummary run;
  SolveStats stats;
  std::optional<LogSummary> other;  ///< strategy this run is the baseline of
};

inline RunReport make_report(const MissionLog& log, const FlightPlan& plan,
                             const std::optional<MissionLog>& other = std::nullopt) {
  RunReport r;
  r.run = summarize(log, plan);
  r.stats = solve_stats(log);
  if (other) {
    r.other = summarize(*other, plan);
    if (r.other->scenario != r.run.scenario || r.other->plan != r.run.plan)
      fail(ErrorKind::MismatchedScenario, "baseline comparison across different scenarios");
  }
  return r;
}

inline json to_json(const RunReport& r) {
  json j;
  j["run"] = to_json(r.run);
  j["horizon_initial"] = r.stats.horizon0;
  j["solves"] = r.stats.solves;
  j["solve_time_mean_s"] = r.stats.mean_time;
  j["solve_time_max_s"] = r.stats.max_time;
  j["solve_time_total_s"] = r.stats.total_time;
  j["iterations_mean"] = r.stats.mean_iterations;
  j["iterations_max"] = r.stats.max_iterations;
  if (r.other) {
    json b;
    b["strategy"] = r.other->strategy;
    b["total_fuel_kg"] = r.other->total_fuel;
    b["final_soc_MJ"] = units::to_MJ(r.other->final_E);
    b["saving_vs_this_pct"] = saving_pct(r.run.total_fuel, r.other->total_fuel);
    j["baseline_of"] = b;
  }
  return j;
}

inline std::string format_report(const RunReport& r) {
  char buf[512];
  std::string s;
  std::snprintf(buf, sizeof buf, "scenario %s, strategy %s, %d stages of %g s\n", r.run.scenario.c_str(),
                r.run.strategy.c_str(), r.run.stages, r.run.delta);
  s += buf;
  std::snprintf(buf, sizeof buf, "  fuel burnt      %.3f kg\n  final SOC       %.3f MJ\n  max |alpha|     %.3f deg (%d out of range)\n",
                r.run.total_fuel, units::to_MJ(r.run.final_E), r.run.max_abs_alpha, r.run.alpha_violations);
  s += buf;
  if (r.stats.solves > 0) {
    std::snprintf(buf, sizeof buf, "  solves          %d (N0 = %d), %.2f iterations/solve, %.4f s/solve, %.3f s total\n",
                  r.stats.solves, r.stats.horizon0, r.stats.mean_iterations, r.stats.mean_time, r.stats.total_time);
    s += buf;
  }
  if (r.other) {
    std::snprintf(buf, sizeof buf, "  %s fuel %.3f kg: saving %.3f%% against %s\n", r.other->strategy.c_str(),
                  r.other->total_fuel, saving_pct(r.run.total_fuel, r.other->total_fuel), r.run.strategy.c_str());
    s += buf;
  }
  return s;
}

struct CompareRow {
  LogSummary run;
  double saving_pct = 0.0;  ///< against the highest-fuel row
};

struct Comparison {
  std::vector<CompareRow> rows;
  std::vector<std::string> violations;  ///< MPC worse than a heuristic on the same scenario
};

inline int strategy_rank(const std::string& s) {
  if (s == "mpc") return 0;
  if (s == "cdcs") return 1;
  if (s == "gt-only") return 2;
  return 3;
}

/**
 * @brief Aligned table of runs over one flight plan.
 *
 * Rows are ordered MPC, CDCS, GT-only (input order otherwise). Any MPC run that burns more than
 * a heuristic on the same scenario is listed as a violation. Runs that did not complete keep
 * their row but take no part in savings or violations.
 */
inline Comparison compare(std::vector<LogSummary> runs, double tolerance_kg = 1e-6) {
  require(runs.size() >= 2, ErrorKind::InvalidArgument, "compare needs at least two runs");
  for (const auto& r : runs)
    if (r.plan != runs.front().plan || r.delta != runs.front().delta)
      fail(ErrorKind::MismatchedScenario, "runs '" + runs.front().scenario + "/" + runs.front().strategy + "' and '" +
                                              r.scenario + "/" + r.strategy + "' fly different plans");
  std::stable_sort(runs.begin(), runs.end(),
                   [](const auto& a, const auto& b) { return strategy_rank(a.strategy) < strategy_rank(b.strategy); });
  double worst = 0.0;
  for (const auto& r : runs)
    if (r.completed) worst = std::max(worst, r.total_fuel);
  Comparison c;
  for (auto& r : runs) c.rows.push_back({r, r.completed ? saving_pct(worst, r.total_fuel) : 0.0});
  for (const auto& a : runs) {
    if (a.strategy != "mpc" || !a.completed) continue;
    for (const auto& b : runs) {
      if (b.strategy == "mpc" || b.scenario != a.scenario || !b.completed) continue;
      if (a.total_fuel > b.total_fuel + tolerance_kg) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s: mpc burns %.6f kg, more than %s (%.6f kg)", a.scenario.c_str(),
                      a.total_fuel, b.strategy.c_str(), b.total_fuel);
        c.violations.emplace_back(buf);
      }
    }
  }
  return c;
}

inline std::string format_comparison(const Comparison& c) {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s %-8s %14s %14s %10s\n", "scenario", "strategy", "fuel [kg]", "final SOC [MJ]",
                "saving [%]");
  s += buf;
  for (const auto& r : c.rows) {
    if (r.run.completed)
      std::snprintf(buf, sizeof buf, "%-16s %-8s %14.3f %14.3f %10.3f\n", r.run.scenario.c_str(),
                    r.run.strategy.c_str(), r.run.total_fuel, units::to_MJ(r.run.final_E), r.saving_pct);
    else
      std::snprintf(buf, sizeof buf, "%-16s %-8s %14s %14s %10s\n", r.run.scenario.c_str(), r.run.strategy.c_str(),
                    "failed", "-", "-");
    s += buf;
  }
  for (const auto& r : c.rows)
    if (!r.run.completed) s += r.run.scenario + "/" + r.run.strategy + " did not complete: " + r.run.failure + "\n";
  for (const auto& v : c.violations) s += "ORDERING VIOLATION: " + v + "\n";
  return s;
}

/// Per-stage arrays of one OCP solution plus its status line.
inline json to_json(const OcpSolution& sol) {
  json j;
  j["status"] = to_string(sol.status);
  j["objective_kg"] = sol.objective;
  j["iterations"] = sol.iterations;
  j["max_kkt_residual"] = sol.kkt_residual;
  if (!sol.diagnostic.empty()) j["diagnostic"] = sol.diagnostic;
  j["p_gt_W"] = sol.traj.p_gt;
  j["p_b_W"] = sol.traj.p_b;
  j["p_em_W"] = sol.p_em;
  j["m_kg"] = sol.traj.m;
  j["E_J"] = sol.traj.E;
  return j;
}

}  // namespace hema::report
