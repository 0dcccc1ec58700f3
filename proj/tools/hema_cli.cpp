// hema: run, validate and compare hybrid-electric energy management missions.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hema/hema.hpp"

namespace fs = std::filesystem;
using namespace hema;

namespace {

enum ExitCode { kOk = 0, kOrdering = 1, kConfig = 2, kSolver = 3, kIo = 4 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Io: return kIo;
    case ErrorKind::Infeasible:
    case ErrorKind::MaxIterations:
    case ErrorKind::BatteryBoundsBreach:
    case ErrorKind::DemandExceedsCapacity:
    case ErrorKind::InfeasibleBatteryDraw: return kSolver;
    default: return kConfig;
  }
}

struct CommonOptions {
  std::string scenario = "default";
  std::optional<double> delta_s;
  std::optional<double> lambda_kg_per_MJ;
  std::string out;
  bool cold = false;
};

std::optional<double> lambda_override(const CommonOptions& o) {
  if (!o.lambda_kg_per_MJ) return std::nullopt;
  if (*o.lambda_kg_per_MJ < 0.0) fail(ErrorKind::Config, "--lambda-kg-per-MJ must be >= 0");
  return units::kg_per_MJ(*o.lambda_kg_per_MJ);
}

Strategy strategy_from(const std::string& s) {
  auto st = parse_strategy(s);
  if (!st) fail(ErrorKind::Config, "unknown strategy '" + s + "' (mpc, cdcs, gt-only)");
  return *st;
}

MissionLog fly(const Scenario& sc, Strategy strategy, const CommonOptions& o) {
  auto cfg = strategy_config(sc, strategy, lambda_override(o));
  cfg.warm_start = !o.cold;
  return run_mission(sc.plan, sc.params, cfg, sc.name);
}

std::string stem(const MissionLog& log) { return log.scenario + "_" + to_string(log.strategy); }

void write_log(const MissionLog& log, const FlightPlan& plan, const fs::path& dir) {
  io::write_file(dir / (stem(log) + ".csv"), report::log_csv(log));
  io::write_file(dir / (stem(log) + ".json"), report::to_json(report::summarize(log, plan)).dump(2) + "\n");
}

int cmd_run(const CommonOptions& o, const std::string& strategy, const std::optional<std::string>& baseline_of) {
  const auto sc = load_scenario(o.scenario, o.delta_s);
  const auto st = strategy_from(strategy);
  const fs::path out = o.out.empty() ? fs::path("hema_out") : fs::path(o.out);
  MissionLog log;
  try {
    log = fly(sc, st, o);
  } catch (const MissionError& e) {
    write_log(e.log(), sc.plan, out);
    throw;
  }
  write_log(log, sc.plan, out);
  std::optional<MissionLog> other;
  if (baseline_of) {
    other = fly(sc, strategy_from(*baseline_of), o);
    write_log(*other, sc.plan, out);
  }
  const auto rep = report::make_report(log, sc.plan, other);
  io::write_file(out / (stem(log) + "_report.json"), report::to_json(rep).dump(2) + "\n");
  std::cout << report::format_report(rep);
  std::cout << "  written to " << out.string() << "\n";
  return kOk;
}

int oracle_spot_check(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int worst = kOk;
  for (int k = 0; k < 5; ++k) {
    const auto p = random_ocp_problem(rng, 1 + k % 3);
    const auto sol = solve(p);
    const auto ref = brute_force_reference(p, 41);
    const bool ok = sol.status == OcpStatus::Optimal && ref.feasible && sol.objective <= ref.objective + 1e-6 &&
                    ref.objective - sol.objective <= ref.grid_slack + 1e-6;
    std::printf("  oracle instance %d (N=%zu): convex %.6f kg, grid %.6f kg, slack %.3g kg  %s\n", k, p.N,
                sol.objective, ref.objective, ref.grid_slack, ok ? "ok" : "MISMATCH");
    if (!ok) worst = kSolver;
  }
  return worst;
}

int cmd_validate(const CommonOptions& o, std::optional<std::uint64_t> seed) {
  const auto sc = load_scenario(o.scenario, o.delta_s);
  auto cfg = strategy_config(sc, Strategy::Mpc, lambda_override(o));
  const auto eff = apply_overrides(sc.params, cfg);
  const auto stages = schedule_mission(sc.plan, eff);
  std::printf("scenario %s (%s)\n", sc.name.c_str(), sc.source.string().c_str());
  std::printf("  plan: %zu stages of %g s, plan id %s\n", sc.plan.stages(), sc.plan.delta,
              report::plan_id(sc.plan).c_str());
  if (cfg.fuel_scale != 1.0) std::printf("  fuel map beta1 scale %.6f\n", cfg.fuel_scale);
  double amax = 0.0;
  int bad = 0;
  for (std::size_t i = 0; i < sc.plan.stages(); ++i) {
    const auto a = recover_alpha(i, eff.m0, sc.plan, eff.aero);
    amax = std::max(amax, std::abs(a.alpha_deg));
    bad += a.in_range ? 0 : 1;
  }
  std::printf("  alpha at m0: max |alpha| %.3f deg, %d stages out of range\n", amax, bad);
  const auto d = mpc_step(PlantState{eff.m0, eff.E0, 0}, stages, sc.plan.delta, eff, cfg);
  std::printf("  k = 0 problem: N = %zu, %s in %d iterations, predicted fuel %.3f kg\n", d.problem.N,
              to_string(d.solution.status), d.solution.iterations, d.solution.objective);
  if (!o.out.empty()) {
    const auto path = fs::path(o.out) / (sc.name + "_k0_solution.json");
    io::write_file(path, report::to_json(d.solution).dump(2) + "\n");
    std::printf("  solution written to %s\n", path.string().c_str());
  }
  return seed ? oracle_spot_check(*seed) : kOk;
}

int cmd_compare(const CommonOptions& o, const std::vector<std::string>& files, const std::vector<std::string>& scenarios,
                const std::vector<std::string>& strategies) {
  std::vector<report::LogSummary> runs;
  for (const auto& f : files) runs.push_back(report::load_summary(f));
  for (const auto& name : scenarios) {
    const auto sc = load_scenario(name, o.delta_s);
    for (const auto& s : strategies) {
      MissionLog log;
      try {
        log = fly(sc, strategy_from(s), o);
      } catch (const MissionError& e) {
        log = e.log();
      }
      if (!o.out.empty()) write_log(log, sc.plan, o.out);
      runs.push_back(report::summarize(log, sc.plan));
    }
  }
  const auto c = report::compare(runs);
  const auto table = report::format_comparison(c);
  std::cout << table;
  if (!o.out.empty()) io::write_file(fs::path(o.out) / "comparison.txt", table);
  if (!c.violations.empty()) return kOrdering;
  const bool all_completed = std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.completed; });
  return all_completed ? kOk : kSolver;
}

int cmd_generate(const std::string& out) {
  const fs::path dir(out);
  io::write_file(dir / "flight_plan.csv", io::format_flight_plan(synthetic::default_flight_plan()));
  io::write_file(dir / "fan_map.csv", io::format_fan_map(synthetic::fan_map()));
  io::write_file(dir / "coefficients.csv", io::format_coeff_table(synthetic::coeff_table()));
  std::cout << "synthetic flight plan, fan map and coefficient table written to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid-electric aircraft energy management: MPC and heuristic baselines"};
  app.require_subcommand(1);
  CommonOptions o;
  std::optional<std::uint64_t> seed;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "scenario name or path to a .scn file");
    sub->add_option("--delta-s", o.delta_s, "resample the flight plan at this interval [s]");
    sub->add_option("--lambda-kg-per-MJ", o.lambda_kg_per_MJ, "terminal SOC weight [kg/MJ]");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", seed, "seed for randomized checks");
    sub->add_flag("--cold", o.cold, "cold-start every MPC solve");
  };

  std::string strategy = "mpc";
  std::optional<std::string> baseline_of;
  auto* run = app.add_subcommand("run", "fly one scenario with one strategy");
  common(run);
  run->add_option("--strategy", strategy, "mpc | cdcs | gt-only");
  run->add_option("--baseline-of", baseline_of, "also fly this strategy and report its saving against this run");

  auto* validate = app.add_subcommand("validate", "parse, schedule and solve the first problem only");
  common(validate);

  std::vector<std::string> files, scenarios, strategies{"mpc", "cdcs", "gt-only"};
  auto* cmp = app.add_subcommand("compare", "table of runs over one flight plan");
  common(cmp);
  cmp->add_option("summaries", files, "mission summary JSON files written by run");
  cmp->add_option("--scenarios", scenarios, "scenarios to fly (repeatable)");
  cmp->add_option("--strategies", strategies, "strategies to fly for each scenario");

  std::string data_out = "data";
  auto* gen = app.add_subcommand("generate-data", "write the synthetic plan and maps as CSV");
  gen->add_option("--out", data_out, "output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(o, strategy, baseline_of);
    if (validate->parsed()) return cmd_validate(o, seed);
    if (cmp->parsed()) {
      if (files.empty() && scenarios.empty()) scenarios.push_back(o.scenario);
      return cmd_compare(o, files, scenarios, strategies);
    }
    if (gen->parsed()) return cmd_generate(data_out);
  } catch (const Error& e) {
    std::cerr << "hema: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "hema: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
