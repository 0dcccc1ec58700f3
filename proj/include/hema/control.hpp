#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hema/errors.hpp"
#include "hema/flight_dynamics.hpp"
#include "hema/ocp.hpp"
#include "hema/powertrain.hpp"
#include "hema/scheduling.hpp"

namespace hema {

struct PlantState {
  double m = 0.0;  ///< kg
  double E = 0.0;  ///< J, per arrangement
  std::size_t k = 0;
};

struct PowerSplit {
  double p_gt = 0.0;  ///< W per arrangement
  double p_em = 0.0;
};

enum class Strategy { Mpc, Cdcs, GtOnly };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Mpc: return "mpc";
    case Strategy::Cdcs: return "cdcs";
    case Strategy::GtOnly: return "gt-only";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "mpc") return Strategy::Mpc;
  if (s == "cdcs") return Strategy::Cdcs;
  if (s == "gt-only" || s == "gt_only" || s == "gt") return Strategy::GtOnly;
  return std::nullopt;
}

/// Multipliers applied to the plant's maps only (model mismatch experiments). 1 = exact model.
struct PlantPerturbation {
  double fuel_scale = 1.0;
  double loss_scale = 1.0;
};

struct StrategyConfig {
  Strategy strategy = Strategy::Mpc;
  double lambda = 0.0;                      ///< kg/J
  std::optional<double> p_em_min_override;  ///< W
  std::optional<double> p_gt_max_override;  ///< W
  double fuel_scale = 1.0;                  ///< multiplies beta1 of the fuel map
  bool warm_start = true;
  OcpTolerances tol;
  PlantPerturbation plant;
};

/// Aircraft, powertrain and mission-start parameters.
struct MissionParams {
  AeroParams aero;
  BatteryParams battery;
  PowerLimits limits;
  PowertrainMaps maps;
  double m0 = 42000.0;
  double m_dry = 34000.0;
  double E0 = 0.0;
};

/// Effective parameters after the strategy's overrides.
inline MissionParams apply_overrides(MissionParams p, const StrategyConfig& cfg) {
  if (cfg.p_em_min_override) p.limits.p_em_min = *cfg.p_em_min_override;
  if (cfg.p_gt_max_override) p.limits.p_gt_max = *cfg.p_gt_max_override;
  require(p.limits.valid(), ErrorKind::Config, "power limits inconsistent after overrides");
  require(cfg.fuel_scale > 0.0, ErrorKind::Config, "fuel scale must be positive");
  for (auto& r : p.maps.table.rows) r.fuel.beta1 *= cfg.fuel_scale;
  return p;
}

struct StepRecord {
  double t = 0.0;
  double p_gt = 0.0;
  double p_em = 0.0;
  double p_b = 0.0;
  double p_drv = 0.0;  ///< per-arrangement demand at the actual mass
  double m = 0.0;      ///< mass at the start of the step
  double E = 0.0;      ///< SOC at the start of the step
  double alpha = 0.0;  ///< deg
  bool alpha_ok = true;
  double omega = 0.0;
  std::string status;  ///< solver status, or the heuristic's name
  int iterations = 0;
  int horizon = 0;
  double solve_time = 0.0;  ///< s, wall clock (not exported to the deterministic log)
};

struct MissionSummary {
  double total_fuel = 0.0;  ///< kg, m(0) - m(T)
  double final_m = 0.0;
  double final_E = 0.0;
  double min_E = 0.0;
  double max_E = 0.0;
  double max_abs_alpha = 0.0;
  int alpha_violations = 0;
  bool completed = false;
};

struct MissionLog {
  std::string scenario;
  Strategy strategy = Strategy::Mpc;
  double delta = 0.0;
  int n_arrangements = 1;
  double m0 = 0.0;
  double E0 = 0.0;
  std::vector<StepRecord> steps;
  MissionSummary summary;
  std::string failure;  ///< empty when the mission completed

  /// Fuel recomputed from the logged engine powers (kg).
  double integrated_fuel(const StageCoefficients& stages) const {
    double f = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) f += n_arrangements * eval_fuel_rate(steps[k].p_gt, stages[k].fuel) * delta;
    return f;
  }
};

/// Raised when a mission cannot continue; carries the log up to the failing step.
class MissionError : public Error {
 public:
  MissionError(ErrorKind kind, const std::string& what, MissionLog partial)
      : Error(kind, what), log_(std::move(partial)) {}
  const MissionLog& log() const { return log_; }

 private:
  MissionLog log_;
};

/// One forward-Euler step of the nonlinear plant: mass from the fuel map, SOC from g.
inline PlantState plant_advance(const PlantState& s, const PowerSplit& split, const StageData& stage,
                                const BatteryParams& battery, int n_arrangements, double delta,
                                const PlantPerturbation& pert = {}) {
  FuelMapCoeffs fuel = stage.fuel;
  fuel.beta2 *= pert.fuel_scale;
  fuel.beta1 *= pert.fuel_scale;
  fuel.beta0 *= pert.fuel_scale;
  LossMapCoeffs loss = stage.loss;
  loss.kappa2 *= pert.loss_scale;
  loss.kappa1 *= pert.loss_scale;
  loss.kappa0 *= pert.loss_scale;

  PlantState next;
  next.k = s.k + 1;
  next.m = s.m - n_arrangements * eval_fuel_rate(split.p_gt, fuel) * delta;
  next.E = s.E - battery_power(split.p_em, loss, battery) * delta;
  const double tol = 1e-6 * (battery.E_max - battery.E_min);
  if (next.E < battery.E_min - tol || next.E > battery.E_max + tol) {
    std::ostringstream os;
    os << "step " << s.k << ": SOC " << next.E << " J leaves [" << battery.E_min << ", " << battery.E_max << "]";
    fail(ErrorKind::BatteryBoundsBreach, os.str());
  }
  return next;
}

/**
 * @brief Charge-depleting / charge-sustaining heuristic.
 *
 * Positive demand: the motor runs at P_em_max until the battery is empty; on the step that
 * would overshoot E_min the motor power is chosen so that g(P_em) delta = E - E_min exactly.
 * Non-positive demand: gas turbine at its minimum, motor at the least power that still meets
 * the demand (recharging only if P_em_min < 0 and E_max allows).
 */
inline PowerSplit cdcs_split(const PlantState& s, double demand, const StageData& stage, const PowerLimits& limits,
                             const BatteryParams& battery, double delta) {
  PowerSplit out;
  if (demand <= limits.p_gt_min) {
    out.p_gt = limits.p_gt_min;
    double pem = std::clamp(demand - out.p_gt, stage.p_em_min, 0.0);
    if (pem < 0.0) {
      const double pb_floor = std::max(stage.p_b_min, (s.E - battery.E_max) / delta);
      pem = std::max(pem, battery_inverse(std::min(pb_floor, 0.0), stage.loss, battery));
    }
    out.p_em = pem;
    return out;
  }
  const double available = (s.E - battery.E_min) / delta;  // battery power that empties it this step
  double cap = stage.p_em_max;
  if (available < stage.p_b_max)
    cap = available <= stage.p_b_min ? stage.p_em_min : battery_inverse(available, stage.loss, battery);
  out.p_em = std::max(stage.p_em_min, std::min({stage.p_em_max, demand - limits.p_gt_min, cap}));
  if (available <= 0.0) out.p_em = std::max(stage.p_em_min, std::min(out.p_em, 0.0));
  out.p_gt = std::max(limits.p_gt_min, demand - out.p_em);
  if (out.p_gt > limits.p_gt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step " << s.k << ": demand " << demand << " W exceeds gas turbine " << limits.p_gt_max
       << " W plus available motor power " << out.p_em << " W";
    fail(ErrorKind::DemandExceedsCapacity, os.str());
  }
  return out;
}

/// Engine-only flight: the motor stays idle.
inline PowerSplit gt_only_split(const PlantState& s, double demand, const PowerLimits& limits) {
  PowerSplit out;
  out.p_em = 0.0;
  out.p_gt = std::max(limits.p_gt_min, demand);
  if (out.p_gt > limits.p_gt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step " << s.k << ": demand " << demand << " W exceeds gas turbine limit " << limits.p_gt_max << " W";
    fail(ErrorKind::DemandExceedsCapacity, os.str());
  }
  return out;
}

struct MpcDecision {
  PowerSplit split;
  double p_b = 0.0;
  OcpProblem problem;
  OcpSolution solution;
};

/// Shrinking-horizon horizon length at step k for a mission of `total` stages.
inline std::size_t horizon_at(std::size_t total, std::size_t k) { return total - k; }

/**
 * @brief Solves the convex problem over the remaining stages and returns its first move.
 *
 * stages holds the whole mission's scheduled data; only stages k..end are used. Throws on a
 * non-optimal solve (no silent fallback).
 */
inline MpcDecision mpc_step(const PlantState& state, const StageCoefficients& stages, double delta,
                            const MissionParams& params, const StrategyConfig& cfg,
                            const std::optional<WarmStart>& warm = std::nullopt) {
  require(state.k < stages.size(), ErrorKind::InvalidArgument, "mpc_step: no remaining horizon");
  const std::size_t N = horizon_at(stages.size(), state.k);
  StageCoefficients rest(stages.begin() + static_cast<std::ptrdiff_t>(state.k), stages.end());
  MpcDecision d;
  d.problem = assemble(N, delta, std::move(rest), state.m, std::clamp(state.E, params.battery.E_min, params.battery.E_max),
                       params.battery, params.limits, cfg.lambda, params.aero.n_arrangements, params.m_dry);
  d.solution = solve(d.problem, cfg.tol, warm);
  if (d.solution.status != OcpStatus::Optimal) {
    std::ostringstream os;
    os << "step " << state.k << ": solver " << to_string(d.solution.status) << " (" << d.solution.diagnostic << ")";
    fail(d.solution.status == OcpStatus::Infeasible ? ErrorKind::Infeasible : ErrorKind::MaxIterations, os.str());
  }
  const auto& st = d.problem.stages.front();
  d.split.p_gt = std::clamp(d.solution.traj.p_gt.front(), params.limits.p_gt_min, params.limits.p_gt_max);
  d.p_b = std::clamp(d.solution.traj.p_b.front(), st.p_b_min, st.p_b_max);
  d.split.p_em = battery_inverse(d.p_b, st.loss, params.battery);
  return d;
}

using SolveObserver = std::function<void(std::size_t k, const OcpProblem&, const OcpSolution&)>;

/// Schedules the mission for the strategy's effective parameters (constant-mass prior).
inline StageCoefficients schedule_mission(const FlightPlan& plan, const MissionParams& eff) {
  return schedule(plan, eff.m0, eff.maps, eff.limits, eff.aero, eff.battery);
}

/**
 * @brief Closed-loop mission: decide, log, advance the nonlinear plant, repeat.
 *
 * MPC re-solves on the shrinking horizon every step, warm-started from the shifted previous
 * solution unless disabled. Angle of attack is recovered and range-checked every step.
 */
inline MissionLog run_mission(const FlightPlan& plan, const MissionParams& params, const StrategyConfig& cfg,
                              const std::string& scenario = "", const SolveObserver& observer = nullptr) {
  plan.validate();
  const MissionParams eff = apply_overrides(params, cfg);
  const auto stages = schedule_mission(plan, eff);
  const int n = eff.aero.n_arrangements;

  MissionLog log;
  log.scenario = scenario;
  log.strategy = cfg.strategy;
  log.delta = plan.delta;
  log.n_arrangements = n;
  log.m0 = eff.m0;
  log.E0 = eff.E0;
  log.steps.reserve(stages.size());

  PlantState state{eff.m0, eff.E0, 0};
  std::optional<WarmStart> warm;
  auto finish = [&](bool completed) {
    auto& s = log.summary;
    s.completed = completed;
    s.final_m = state.m;
    s.final_E = state.E;
    s.total_fuel = eff.m0 - state.m;
    s.min_E = s.max_E = eff.E0;
    for (const auto& r : log.steps) {
      s.min_E = std::min(s.min_E, r.E);
      s.max_E = std::max(s.max_E, r.E);
      s.max_abs_alpha = std::max(s.max_abs_alpha, std::abs(r.alpha));
      s.alpha_violations += r.alpha_ok ? 0 : 1;
    }
    s.min_E = std::min(s.min_E, state.E);
    s.max_E = std::max(s.max_E, state.E);
  };

  for (std::size_t k = 0; k < stages.size(); ++k) {
    const auto& st = stages[k];
    StepRecord rec;
    rec.t = plan.delta * static_cast<double>(k);
    rec.m = state.m;
    rec.E = state.E;
    rec.omega = st.omega;
    rec.p_drv = drive_power(state.m, st.eta);
    const auto a = recover_alpha(k, state.m, plan, eff.aero);
    rec.alpha = a.alpha_deg;
    rec.alpha_ok = a.in_range;
    rec.horizon = static_cast<int>(stages.size() - k);

    PowerSplit split;
    try {
      switch (cfg.strategy) {
        case Strategy::Mpc: {
          const auto t0 = std::chrono::steady_clock::now();
          auto d = mpc_step(state, stages, plan.delta, eff, cfg, cfg.warm_start ? warm : std::nullopt);
          rec.solve_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          if (observer) observer(k, d.problem, d.solution);
          split = d.split;
          rec.p_b = d.p_b;
          rec.status = to_string(d.solution.status);
          rec.iterations = d.solution.iterations;
          warm = shift_solution(d.solution);
          break;
        }
        case Strategy::Cdcs:
          split = cdcs_split(state, rec.p_drv, st, eff.limits, eff.battery, plan.delta);
          rec.status = "cdcs";
          break;
        case Strategy::GtOnly:
          split = gt_only_split(state, rec.p_drv, eff.limits);
          rec.status = "gt-only";
          break;
      }
      if (cfg.strategy != Strategy::Mpc) rec.p_b = battery_power(split.p_em, st.loss, eff.battery);
      rec.p_gt = split.p_gt;
      rec.p_em = split.p_em;
      state = plant_advance(state, split, st, eff.battery, n, plan.delta, cfg.plant);
    } catch (const Error& e) {
      log.steps.push_back(rec);
      log.failure = e.what();
      finish(false);
      throw MissionError(e.kind(), e.message(), std::move(log));
    }
    log.steps.push_back(rec);
  }
  finish(true);
  return log;
}

/**
 * @brief beta1 multiplier that makes the mission burn `target_fraction` of the take-off mass.
 *
 * The calibration flies the CDCS heuristic (cheap and deterministic) and bisects on the scale
 * factor; burn grows monotonically with it.
 */
inline double calibrate_fuel_scale(const FlightPlan& plan, const MissionParams& params, StrategyConfig cfg,
                                   double target_fraction, double rel_tol = 1e-6) {
  require(target_fraction > 0.0 && target_fraction < 1.0, ErrorKind::Config, "target mass fraction must be in (0, 1)");
  cfg.strategy = Strategy::Cdcs;
  auto burn = [&](double scale) {
    cfg.fuel_scale = scale;
    return run_mission(plan, params, cfg).summary.total_fuel / params.m0;
  };
  double lo = 1e-3, hi = 1.0;
  while (burn(hi) < target_fraction) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e4, ErrorKind::Config, "fuel scale calibration did not bracket the target");
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (burn(mid) < target_fraction ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hema
