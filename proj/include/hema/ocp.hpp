#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hema/errors.hpp"
#include "hema/interior_point.hpp"
#include "hema/powertrain.hpp"
#include "hema/scheduling.hpp"

namespace hema {

/**
 * @brief Shrinking-horizon fuel-optimal power split problem for one arrangement.
 *
 * Stage data are per arrangement; the aircraft mass drops by n_arrangements times the
 * per-arrangement fuel rate. Objective: m0 - m_N - lambda E_N.
 */
struct OcpProblem {
  std::size_t N = 0;
  double delta = 10.0;
  StageCoefficients stages;
  double m0 = 0.0;
  double E0 = 0.0;
  BatteryParams battery;
  PowerLimits limits;
  double lambda = 0.0;  ///< kg/J
  int n_arrangements = 1;
  double m_dry = 0.0;   ///< mass floor, kg
};

/// Physical trajectories. Powers per arrangement, length N; m and E length N+1.
struct Trajectory {
  std::vector<double> p_gt;
  std::vector<double> p_b;
  std::vector<double> m;
  std::vector<double> E;
};

enum class OcpStatus { Optimal, Infeasible, MaxIterations };

inline const char* to_string(OcpStatus s) {
  switch (s) {
    case OcpStatus::Optimal: return "Optimal";
    case OcpStatus::Infeasible: return "Infeasible";
    case OcpStatus::MaxIterations: return "MaxIterations";
  }
  return "Unknown";
}

struct OcpTolerances {
  double feas = 1e-10;
  double opt = 1e-10;
  int max_iterations = 200;
};

struct OcpSolution {
  OcpStatus status = OcpStatus::MaxIterations;
  Trajectory traj;
  std::vector<double> p_em;        ///< g_i^-1(P_b,i)
  std::vector<double> p_em_model;  ///< motor power variable of the relaxed problem (<= p_em)
  double objective = 0.0;          ///< kg
  int iterations = 0;
  double kkt_residual = 0.0;
  std::string diagnostic;          ///< most violated constraint for non-optimal exits
  ipm::Iterate iterate;            ///< scaled solver iterate, reusable as a warm start
};

namespace ocp_detail {

inline constexpr int kBlock = 4;  // p_gt_i, p_em_i, fuel_{i+1}, soc_{i+1}
inline constexpr int kVarGt = 0, kVarEm = 1, kVarFuel = 2, kVarSoc = 3;
inline constexpr int kPerStage = 11;

enum Kind : int {
  kPower = 0,   // P_gt + P_em >= P_drv(m)
  kMass,        // m_{i+1} <= m_i - n f(P_gt) delta
  kBattery,     // h(P_em) <= P_b - (R/U^2) P_b^2, i.e. P_em <= g^-1(P_b)
  kGtLow,
  kGtHigh,
  kEmLow,
  kPbLow,
  kPbHigh,
  kSocLow,
  kSocHigh,
  kDryMass,
};

inline const char* kind_name(int k) {
  static const char* names[] = {"power balance", "mass dynamics", "battery map", "P_gt lower bound",
                                "P_gt upper bound", "P_em lower bound", "P_b lower bound",
                                "P_b upper bound", "SOC lower bound", "SOC upper bound", "dry mass"};
  return (k >= 0 && k < kPerStage) ? names[k] : "?";
}

/// Affine maps between physical and scaled variables.
struct Scaling {
  double power = 1.0;   ///< W per unit
  double fuel = 1.0;    ///< kg per unit of scaled fuel burned
  double energy = 1.0;  ///< J per unit of scaled SOC
  double m0 = 0.0;
  double E_min = 0.0;

  double mass(double fuel_scaled) const { return m0 - fuel * fuel_scaled; }
  double fuel_scaled(double m) const { return (m0 - m) / fuel; }
  double soc(double e) const { return E_min + energy * e; }
  double soc_scaled(double E) const { return (E - E_min) / energy; }
};

inline Scaling make_scaling(const OcpProblem& p) {
  Scaling s;
  s.power = std::max({std::abs(p.limits.p_gt_max), std::abs(p.limits.p_em_max), std::abs(p.limits.p_em_min), 1.0});
  double fuel = 0.0;
  for (const auto& st : p.stages) fuel += eval_fuel_rate(p.limits.p_gt_max, st.fuel);
  s.fuel = std::max(1.0, fuel * p.n_arrangements * p.delta);
  s.energy = p.battery.E_max - p.battery.E_min;
  s.m0 = p.m0;
  s.E_min = p.battery.E_min;
  return s;
}

inline int var(std::size_t stage, int slot) { return static_cast<int>(stage) * kBlock + slot; }

}  // namespace ocp_detail

/// Validates the inputs and returns the problem; N shrinks with the remaining stages.
inline OcpProblem assemble(std::size_t N, double delta, StageCoefficients stages, double m0, double E0,
                           const BatteryParams& battery, const PowerLimits& limits, double lambda,
                           int n_arrangements, double m_dry) {
  require(N >= 1, ErrorKind::InvalidArgument, "ocp: horizon must be at least one stage");
  if (stages.size() != N) {
    std::ostringstream os;
    os << "ocp: " << stages.size() << " stages supplied for horizon " << N;
    fail(ErrorKind::DimensionMismatch, os.str());
  }
  require(delta > 0.0, ErrorKind::InvalidArgument, "ocp: delta must be positive");
  require(battery.valid(), ErrorKind::InconsistentBounds, "ocp: battery parameters invalid");
  require(limits.p_gt_min < limits.p_gt_max, ErrorKind::InconsistentBounds, "ocp: need p_gt_min < p_gt_max");
  require(m0 > 0.0 && m0 > m_dry, ErrorKind::InconsistentBounds, "ocp: need m0 > max(0, m_dry)");
  require(lambda >= 0.0, ErrorKind::InconsistentBounds, "ocp: lambda must be non-negative");
  require(n_arrangements >= 1, ErrorKind::InvalidArgument, "ocp: n_arrangements must be >= 1");
  if (E0 < battery.E_min || E0 > battery.E_max) {
    std::ostringstream os;
    os << "ocp: E0 = " << E0 << " J outside [" << battery.E_min << ", " << battery.E_max << "]";
    fail(ErrorKind::InconsistentBounds, os.str());
  }
  for (std::size_t i = 0; i < N; ++i) {
    const auto& s = stages[i];
    if (!(s.p_b_min < s.p_b_max) || !(s.p_em_min < s.p_em_max) || !s.loss.valid() || !s.fuel.valid()) {
      fail(ErrorKind::InconsistentBounds, "ocp: stage " + std::to_string(i) + " has inconsistent bounds or coefficients");
    }
  }
  OcpProblem p;
  p.N = N;
  p.delta = delta;
  p.stages = std::move(stages);
  p.m0 = m0;
  p.E0 = E0;
  p.battery = battery;
  p.limits = limits;
  p.lambda = lambda;
  p.n_arrangements = n_arrangements;
  p.m_dry = m_dry;
  return p;
}

/// Scaled interior-point program for an assembled problem.
inline ipm::Program<ocp_detail::kBlock> build_program(const OcpProblem& p, const ocp_detail::Scaling& sc) {
  using namespace ocp_detail;
  using ipm::Constraint;
  using ipm::LinearTerm;
  using ipm::SquareTerm;

  ipm::Program<kBlock> prog;
  prog.blocks = static_cast<int>(p.N);
  prog.objective = Eigen::VectorXd::Zero(prog.size());
  prog.objective[var(p.N - 1, kVarFuel)] = 1.0;
  prog.objective[var(p.N - 1, kVarSoc)] = -p.lambda * sc.energy / sc.fuel;
  prog.constraints.reserve(p.N * kPerStage);

  const double n = p.n_arrangements;
  const double e0 = sc.soc_scaled(p.E0);
  const double soc_rate = sc.energy / (p.delta * sc.power);  // scaled P_b per unit SOC drop
  const double fuel_cap = (p.m0 - p.m_dry) / sc.fuel;

  for (std::size_t i = 0; i < p.N; ++i) {
    const auto& st = p.stages[i];
    const int gt = var(i, kVarGt), em = var(i, kVarEm), fuel_next = var(i, kVarFuel), soc_next = var(i, kVarSoc);
    const bool first = (i == 0);
    const int fuel_prev = first ? -1 : var(i - 1, kVarFuel);
    const int soc_prev = first ? -1 : var(i - 1, kVarSoc);
    const int tag0 = static_cast<int>(i) * kPerStage;

    // P_gt + P_em - eta(m0 - M f) >= 0, in units of the power scale.
    {
      Constraint c;
      c.tag = tag0 + kPower;
      c.offset = -drive_power(p.m0, st.eta) / sc.power;
      c.linear = {{gt, 1.0}, {em, 1.0}};
      if (!first) {
        c.linear.push_back({fuel_prev, drive_power_slope(p.m0, st.eta) * sc.fuel / sc.power});
        c.squares.push_back(SquareTerm{st.eta.eta2 * sc.fuel * sc.fuel / sc.power, {{fuel_prev, 1.0}}, 0.0});
      }
      prog.constraints.push_back(std::move(c));
    }
    // fuel_{i+1} - fuel_i - n delta f(P_gt) / M >= 0
    {
      Constraint c;
      c.tag = tag0 + kMass;
      const double k = n * p.delta / sc.fuel;
      c.offset = -k * st.fuel.beta0;
      c.linear = {{fuel_next, 1.0}, {gt, -k * st.fuel.beta1 * sc.power}};
      if (!first) c.linear.push_back({fuel_prev, -1.0});
      if (st.fuel.beta2 > 0.0)
        c.squares.push_back(SquareTerm{k * st.fuel.beta2 * sc.power * sc.power, {{gt, 1.0}}, 0.0});
      prog.constraints.push_back(std::move(c));
    }
    // P_b - (R/U^2) P_b^2 - h(P_em) >= 0, P_b = soc_rate (e_i - e_{i+1}).
    SquareTerm pb;
    pb.form = {{soc_next, -soc_rate}};
    if (first) pb.shift = soc_rate * e0;
    else pb.form.push_back({soc_prev, soc_rate});
    {
      Constraint c;
      c.tag = tag0 + kBattery;
      c.offset = pb.shift - st.loss.kappa0 / sc.power;
      c.linear = pb.form;
      c.linear.push_back({em, -st.loss.kappa1});
      SquareTerm resist = pb;
      resist.weight = p.battery.R * sc.power / (p.battery.U * p.battery.U);
      c.squares.push_back(std::move(resist));
      if (st.loss.kappa2 > 0.0) c.squares.push_back(SquareTerm{st.loss.kappa2 * sc.power, {{em, 1.0}}, 0.0});
      prog.constraints.push_back(std::move(c));
    }
    auto bound = [&](int kind, double offset, std::vector<LinearTerm> terms) {
      Constraint c;
      c.tag = tag0 + kind;
      c.offset = offset;
      c.linear = std::move(terms);
      prog.constraints.push_back(std::move(c));
    };
    bound(kGtLow, -p.limits.p_gt_min / sc.power, {{gt, 1.0}});
    bound(kGtHigh, p.limits.p_gt_max / sc.power, {{gt, -1.0}});
    bound(kEmLow, -st.p_em_min / sc.power, {{em, 1.0}});
    {
      auto lo = pb.form;
      bound(kPbLow, pb.shift - st.p_b_min / sc.power, lo);
      auto hi = pb.form;
      for (auto& t : hi) t.coef = -t.coef;
      bound(kPbHigh, st.p_b_max / sc.power - pb.shift, hi);
    }
    bound(kSocLow, 0.0, {{soc_next, 1.0}});
    bound(kSocHigh, 1.0, {{soc_next, -1.0}});
    bound(kDryMass, fuel_cap, {{fuel_next, -1.0}});
  }
  return prog;
}

namespace ocp_detail {

/// Lowest drive power stage i can demand for masses in [m_lo, m_hi].
inline double min_demand(const StageEta& eta, double m_lo, double m_hi) {
  const double vertex = -eta.eta1 / (2.0 * eta.eta2);
  const double m = std::clamp(vertex, m_lo, m_hi);
  return drive_power(m, eta);
}

/// Capacity check: a stage whose demand exceeds P_gt_max + P_em_max at every reachable mass.
inline std::optional<std::string> capacity_violation(const OcpProblem& p) {
  double burn = 0.0;
  for (const auto& st : p.stages) burn += eval_fuel_rate(p.limits.p_gt_max, st.fuel) * p.n_arrangements * p.delta;
  const double m_lo = std::max(p.m_dry, p.m0 - burn);
  for (std::size_t i = 0; i < p.N; ++i) {
    const auto& st = p.stages[i];
    const double need = min_demand(st.eta, m_lo, p.m0);
    const double cap = p.limits.p_gt_max + st.p_em_max;
    if (need > cap) {
      std::ostringstream os;
      os << "stage " << i << ": demand " << need << " W exceeds capacity " << cap << " W";
      return os.str();
    }
  }
  return std::nullopt;
}

/// Simple feasible-leaning trajectory: spread half the usable energy evenly, engine covers the rest.
inline Eigen::VectorXd heuristic_start(const OcpProblem& p, const Scaling& sc) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(p.N) * kBlock);
  double m = p.m0, E = p.E0;
  const double usable = std::max(0.0, p.E0 - p.battery.E_min);
  for (std::size_t i = 0; i < p.N; ++i) {
    const auto& st = p.stages[i];
    const double margin_b = 1e-3 * (st.p_b_max - st.p_b_min);
    const double pb = std::clamp(0.5 * usable / (static_cast<double>(p.N) * p.delta), st.p_b_min + margin_b,
                                 st.p_b_max - margin_b);
    double pem = battery_inverse(pb, st.loss, p.battery);
    pem = std::max(pem - 1e-3 * sc.power, st.p_em_min + 1e-4 * sc.power);
    const double margin_gt = 1e-3 * (p.limits.p_gt_max - p.limits.p_gt_min);
    const double pgt = std::clamp(drive_power(m, st.eta) - pem + 1e-3 * sc.power, p.limits.p_gt_min + margin_gt,
                                  p.limits.p_gt_max - margin_gt);
    m -= p.n_arrangements * eval_fuel_rate(pgt, st.fuel) * p.delta * (1.0 + 1e-6);
    E = std::clamp(E - pb * p.delta, p.battery.E_min + 1e-4 * sc.energy, p.battery.E_max - 1e-4 * sc.energy);
    x[var(i, kVarGt)] = pgt / sc.power;
    x[var(i, kVarEm)] = pem / sc.power;
    x[var(i, kVarFuel)] = sc.fuel_scaled(m);
    x[var(i, kVarSoc)] = sc.soc_scaled(E);
  }
  return x;
}

}  // namespace ocp_detail

/// Physical initial guess for a warm start (e.g. the previous MPC solution shifted by one stage).
struct WarmStart {
  Trajectory traj;
  std::vector<double> p_em_model;
  Eigen::VectorXd slacks;       ///< scaled slacks, kPerStage per stage (optional)
  Eigen::VectorXd multipliers;  ///< scaled multipliers, kPerStage per stage (optional)
};

/// Drops the first stage of a solution so it lines up with the next shrinking-horizon problem.
inline std::optional<WarmStart> shift_solution(const OcpSolution& sol) {
  const std::size_t N = sol.traj.p_gt.size();
  if (N < 2 || sol.status != OcpStatus::Optimal) return std::nullopt;
  WarmStart w;
  w.traj.p_gt.assign(sol.traj.p_gt.begin() + 1, sol.traj.p_gt.end());
  w.traj.p_b.assign(sol.traj.p_b.begin() + 1, sol.traj.p_b.end());
  w.traj.m.assign(sol.traj.m.begin() + 1, sol.traj.m.end());
  w.traj.E.assign(sol.traj.E.begin() + 1, sol.traj.E.end());
  w.p_em_model.assign(sol.p_em_model.begin() + 1, sol.p_em_model.end());
  const auto k = ocp_detail::kPerStage;
  const auto rest = static_cast<Eigen::Index>((N - 1) * k);
  if (sol.iterate.s.size() == static_cast<Eigen::Index>(N * k)) {
    w.slacks = sol.iterate.s.tail(rest);
    w.multipliers = sol.iterate.z.tail(rest);
  }
  return w;
}

/**
 * @brief Solves the convex relaxation with the structured interior-point method.
 *
 * P_em is reported as g_i^-1(P_b,i); with the relaxation tight it equals the solver's motor
 * power variable.
 */
inline OcpSolution solve(const OcpProblem& p, const OcpTolerances& tol = {},
                         const std::optional<WarmStart>& warm = std::nullopt) {
  using namespace ocp_detail;
  OcpSolution out;
  if (auto why = capacity_violation(p)) {
    out.status = OcpStatus::Infeasible;
    out.diagnostic = *why;
    return out;
  }
  const auto sc = make_scaling(p);
  const auto prog = build_program(p, sc);

  ipm::Iterate start;
  if (warm && warm->traj.p_gt.size() == p.N && warm->traj.m.size() == p.N + 1) {
    start.x.resize(prog.size());
    for (std::size_t i = 0; i < p.N; ++i) {
      start.x[var(i, kVarGt)] = warm->traj.p_gt[i] / sc.power;
      start.x[var(i, kVarEm)] = warm->p_em_model[i] / sc.power;
      start.x[var(i, kVarFuel)] = sc.fuel_scaled(warm->traj.m[i + 1] - (warm->traj.m[0] - p.m0));
      start.x[var(i, kVarSoc)] = sc.soc_scaled(warm->traj.E[i + 1] - (warm->traj.E[0] - p.E0));
    }
    if (warm->slacks.size() == static_cast<Eigen::Index>(prog.constraints.size())) {
      start.s = warm->slacks;
      start.z = warm->multipliers;
    }
  } else {
    start.x = heuristic_start(p, sc);
  }

  ipm::Settings settings;
  settings.feas_tol = tol.feas;
  settings.opt_tol = tol.opt;
  settings.max_iterations = tol.max_iterations;
  const auto r = ipm::Solver<kBlock>(settings).solve(prog, std::move(start));

  switch (r.status) {
    case ipm::Status::Optimal: out.status = OcpStatus::Optimal; break;
    case ipm::Status::Infeasible: out.status = OcpStatus::Infeasible; break;
    case ipm::Status::MaxIterations: out.status = OcpStatus::MaxIterations; break;
  }
  out.iterations = r.iterations;
  out.kkt_residual = std::max({r.primal_residual, r.dual_residual, r.gap});

  const auto& x = r.point.x;
  out.traj.p_gt.resize(p.N);
  out.traj.p_b.resize(p.N);
  out.p_em.resize(p.N);
  out.p_em_model.resize(p.N);
  out.traj.m.resize(p.N + 1);
  out.traj.E.resize(p.N + 1);
  out.traj.m[0] = p.m0;
  out.traj.E[0] = p.E0;
  for (std::size_t i = 0; i < p.N; ++i) {
    const auto& st = p.stages[i];
    out.traj.p_gt[i] = x[var(i, kVarGt)] * sc.power;
    out.p_em_model[i] = x[var(i, kVarEm)] * sc.power;
    out.traj.m[i + 1] = sc.mass(x[var(i, kVarFuel)]);
    out.traj.E[i + 1] = sc.soc(x[var(i, kVarSoc)]);
    out.traj.p_b[i] = (out.traj.E[i] - out.traj.E[i + 1]) / p.delta;
    const double pb = std::clamp(out.traj.p_b[i], st.p_b_min, st.p_b_max);
    out.p_em[i] = battery_inverse(pb, st.loss, p.battery);
  }
  out.objective = p.m0 - out.traj.m[p.N] - p.lambda * out.traj.E[p.N];
  if (out.status != OcpStatus::Optimal && r.worst_constraint >= 0) {
    const int tag = prog.constraints[static_cast<std::size_t>(r.worst_constraint)].tag;
    std::ostringstream os;
    os << "most violated: " << kind_name(tag % kPerStage) << " at stage " << tag / kPerStage << " (by "
       << r.worst_violation << " scaled units)";
    out.diagnostic = os.str();
  } else if (out.status != OcpStatus::Optimal) {
    out.diagnostic = "no progress towards feasibility";
  }
  out.iterate = r.point;
  return out;
}

/// Largest violation of the convex problem's constraints by a physical trajectory, relative to
/// the natural scale of each constraint (power bounds, fuel per stage, SOC band).
inline double max_violation(const OcpProblem& p, const Trajectory& t, const std::vector<double>& p_em_model) {
  double worst = 0.0;
  const double pscale = std::max(std::abs(p.limits.p_gt_max), 1.0);
  const double escale = p.battery.E_max - p.battery.E_min;
  auto viol = [&](double v, double scale) { worst = std::max(worst, std::max(0.0, -v) / scale); };
  viol(std::abs(t.m[0] - p.m0) < 1e-9 * p.m0 ? 0.0 : -1.0, 1.0);
  viol(std::abs(t.E[0] - p.E0) < 1e-9 * escale ? 0.0 : -1.0, 1.0);
  for (std::size_t i = 0; i < p.N; ++i) {
    const auto& st = p.stages[i];
    const double fuel = p.n_arrangements * eval_fuel_rate(t.p_gt[i], st.fuel) * p.delta;
    viol(t.p_gt[i] + p_em_model[i] - drive_power(t.m[i], st.eta), pscale);
    viol(t.m[i] - fuel - t.m[i + 1], std::max(fuel, 1.0));
    viol(bus_power_from_battery(t.p_b[i], p.battery) - eval_electrical_draw(p_em_model[i], st.loss), pscale);
    viol(escale * 1e-12 - std::abs(t.E[i + 1] - (t.E[i] - t.p_b[i] * p.delta)), escale);
    viol(t.p_gt[i] - p.limits.p_gt_min, pscale);
    viol(p.limits.p_gt_max - t.p_gt[i], pscale);
    viol(p_em_model[i] - st.p_em_min, pscale);
    viol(t.p_b[i] - st.p_b_min, pscale);
    viol(st.p_b_max - t.p_b[i], pscale);
    viol(t.E[i + 1] - p.battery.E_min, escale);
    viol(p.battery.E_max - t.E[i + 1], escale);
  }
  return worst;
}

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;       ///< kg, best over the grid
  double grid_slack = 0.0;      ///< kg, bound on (grid optimum - true optimum)
  std::vector<double> p_b;      ///< argmin battery powers
  std::size_t evaluated = 0;
};

/**
 * @brief Exhaustive search over gridded battery power for the original (unrelaxed) dynamics.
 *
 * Each stage takes P_b from a uniform grid on [P_b_min, P_b_max]; the motor delivers
 * g^-1(P_b), the gas turbine covers the remaining demand at the simulated mass (at least its
 * lower bound), and the exact mass and SOC recursions are applied. grid_slack bounds the loss
 * from rounding the continuous optimum down to the grid, assuming the gas-turbine upper bound
 * and E_max are not active there.
 */
inline OracleResult brute_force_reference(const OcpProblem& p, int grid_points, double budget = 2e7) {
  require(grid_points >= 2, ErrorKind::InvalidArgument, "oracle: need at least two grid points");
  const double combos = std::pow(static_cast<double>(grid_points), static_cast<double>(p.N));
  if (combos > budget) {
    std::ostringstream os;
    os << "oracle: " << combos << " combinations exceed budget " << budget;
    fail(ErrorKind::OracleTooLarge, os.str());
  }
  OracleResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<double> chosen(p.N), grid(static_cast<std::size_t>(grid_points));
  const double n = p.n_arrangements;

  std::function<void(std::size_t, double, double)> dfs = [&](std::size_t i, double m, double E) {
    if (i == p.N) {
      ++best.evaluated;
      const double J = p.m0 - m - p.lambda * E;
      if (J < best.objective) {
        best.objective = J;
        best.p_b = chosen;
        best.feasible = true;
      }
      return;
    }
    const auto& st = p.stages[i];
    const double demand = drive_power(m, st.eta);
    for (int g = 0; g < grid_points; ++g) {
      const double pb = st.p_b_min + (st.p_b_max - st.p_b_min) * g / (grid_points - 1);
      const double E1 = E - pb * p.delta;
      if (E1 < p.battery.E_min || E1 > p.battery.E_max) continue;
      const double pem = battery_inverse(pb, st.loss, p.battery);
      const double pgt = std::max(p.limits.p_gt_min, demand - pem);
      if (pgt > p.limits.p_gt_max) continue;
      const double m1 = m - n * eval_fuel_rate(pgt, st.fuel) * p.delta;
      if (m1 < p.m_dry) continue;
      chosen[i] = pb;
      dfs(i + 1, m1, E1);
    }
  };
  dfs(0, p.m0, p.E0);

  for (const auto& st : p.stages) {
    const double step = (st.p_b_max - st.p_b_min) / (grid_points - 1);
    best.grid_slack += n * p.delta * fuel_rate_slope(p.limits.p_gt_max, st.fuel) *
                       battery_inverse_slope(st.p_b_min, st.loss, p.battery) * step;
  }
  return best;
}

}  // namespace hema
