#include <gtest/gtest.h>

#include <random>

#include "hema/control.hpp"
#include "hema/ocp.hpp"
#include "hema/random_instances.hpp"
#include "hema/synthetic.hpp"
#include "hema/units.hpp"
#include "oracles.hpp"

using namespace hema;

namespace {

const BatteryParams kBattery{750.0, 0.01, units::MJ(221.0), units::MJ(939.0)};
const PowerLimits kLimits{0.0, units::MW(5.0), 0.0, units::MW(2.0)};

StageData make(const StageEta& eta, const LossMapCoeffs& loss, const FuelMapCoeffs& fuel,
               const PowerLimits& lim = kLimits, const BatteryParams& b = kBattery) {
  return make_stage(eta, CoeffRow{200.0, loss, fuel}, drive_power(42000.0, eta), lim, b);
}

OcpProblem default_k0(double lambda = 0.0) {
  MissionParams mp;
  mp.battery = kBattery;
  mp.limits = kLimits;
  mp.maps = {synthetic::fan_map(), synthetic::coeff_table()};
  mp.E0 = kBattery.E_max;
  auto stages = schedule_mission(synthetic::default_flight_plan(), mp);
  const auto N = stages.size();
  return assemble(N, 10.0, std::move(stages), mp.m0, mp.E0, kBattery, kLimits, lambda, 4, mp.m_dry);
}

oracle::OcpInstance to_oracle(const OcpProblem& p) {
  oracle::OcpInstance o;
  o.delta = p.delta;
  o.m0 = p.m0;
  o.E0 = p.E0;
  o.E_min = p.battery.E_min;
  o.E_max = p.battery.E_max;
  o.lambda = p.lambda;
  o.m_dry = p.m_dry;
  o.pgt_lo = p.limits.p_gt_min;
  o.pgt_hi = p.limits.p_gt_max;
  o.n = p.n_arrangements;
  o.U = p.battery.U;
  o.R = p.battery.R;
  for (const auto& s : p.stages)
    o.stages.push_back({s.eta.eta2, s.eta.eta1, s.eta.eta0, s.loss.kappa2, s.loss.kappa1, s.loss.kappa0, s.fuel.beta2,
                        s.fuel.beta1, s.fuel.beta0, s.p_em_min, s.p_em_max});
  return o;
}

/// Cost bound of rounding the motor power down to a uniform grid of `points` per stage.
double motor_grid_slack(const OcpProblem& p, int points) {
  double slack = 0.0;
  for (const auto& s : p.stages)
    slack += p.n_arrangements * p.delta * fuel_rate_slope(p.limits.p_gt_max, s.fuel) * (s.p_em_max - s.p_em_min) /
             (points - 1);
  return slack;
}

void expect_equality_recovery(const OcpProblem& p, const OcpSolution& s) {
  const auto& t = s.traj;
  for (std::size_t i = 0; i < p.N; ++i) {
    const auto& st = p.stages[i];
    const double burn = p.n_arrangements * eval_fuel_rate(t.p_gt[i], st.fuel) * p.delta;
    EXPECT_LE(std::abs(t.m[i] - burn - t.m[i + 1]), 1e-6 * burn) << "stage " << i;
    const double band = 1e-6 * p.limits.p_gt_max;
    if (t.p_gt[i] > p.limits.p_gt_min + band && t.p_gt[i] < p.limits.p_gt_max - band) {
      const double demand = drive_power(t.m[i], st.eta);
      EXPECT_LE(std::abs(t.p_gt[i] + s.p_em[i] - demand), 1e-6 * std::max(std::abs(demand), p.limits.p_gt_max))
          << "stage " << i;
    }
  }
}

}  // namespace

TEST(Assemble, DefaultMissionHorizon) { EXPECT_EQ(default_k0().N, 360u); }

TEST(Assemble, StageCountMismatch) {
  StageCoefficients st(2, make({1e-4, 20.0, 0.0}, {1e-8, 1.03, 0.0}, {0.0, 8e-8, 0.03}));
  try {
    assemble(3, 10.0, st, 42000.0, kBattery.E_max, kBattery, kLimits, 0.0, 4, 34000.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Assemble, InitialSocOutsideBand) {
  StageCoefficients st(1, make({1e-4, 20.0, 0.0}, {1e-8, 1.03, 0.0}, {0.0, 8e-8, 0.03}));
  for (double E0 : {kBattery.E_min - 1.0, kBattery.E_max + 1.0}) {
    try {
      assemble(1, 10.0, st, 42000.0, E0, kBattery, kLimits, 0.0, 4, 34000.0);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InconsistentBounds);
    }
  }
}

TEST(Assemble, NegativeWeightRejected) {
  StageCoefficients st(1, make({1e-4, 20.0, 0.0}, {1e-8, 1.03, 0.0}, {0.0, 8e-8, 0.03}));
  EXPECT_THROW(assemble(1, 10.0, st, 42000.0, kBattery.E_max, kBattery, kLimits, -1.0, 4, 34000.0), Error);
}

TEST(Solve, DemandAboveCapacityIsInfeasible) {
  // 8 MW per arrangement against 5 MW + 2 MW of capacity
  StageCoefficients st(3, make({1e-9, 0.0, 8e6}, {1e-8, 1.03, 0.0}, {0.0, 8e-8, 0.03}));
  const auto p = assemble(3, 10.0, st, 42000.0, kBattery.E_max, kBattery, kLimits, 0.0, 4, 34000.0);
  const auto s = solve(p);
  EXPECT_EQ(s.status, OcpStatus::Infeasible);
  EXPECT_FALSE(s.diagnostic.empty());
}

TEST(Solve, ZeroDemandBurnsIdleFuelOnly) {
  const FuelMapCoeffs fuel{0.0, units::kg_per_MJ(0.08), 0.03};
  StageCoefficients st(4, make({1e-12, 0.0, -1e5}, {1e-8, 1.03, 0.0}, fuel));
  const auto p = assemble(4, 10.0, st, 42000.0, units::MJ(500.0), kBattery, kLimits, 0.0, 4, 34000.0);
  const auto s = solve(p);
  ASSERT_EQ(s.status, OcpStatus::Optimal);
  const double expect = 4 * 0.03 * 10.0 * 4;
  EXPECT_NEAR(s.objective, expect, 1e-7);
  for (double pgt : s.traj.p_gt) EXPECT_NEAR(pgt, 0.0, 1e-3);
  EXPECT_NEAR(oracle::grid_search(to_oracle(p), 5), expect, 1e-9);
}

TEST(Solve, SingleStagePositiveDemand) {
  const FuelMapCoeffs fuel{0.0, units::kg_per_MJ(0.08), 0.03};
  const StageEta eta{1e-9, 0.0, 1.5e6};
  StageCoefficients st(1, make(eta, {1e-8, 1.03, 0.0}, fuel));
  const auto p = assemble(1, 10.0, st, 42000.0, kBattery.E_max, kBattery, kLimits, 0.0, 4, 34000.0);
  const auto s = solve(p);
  ASSERT_EQ(s.status, OcpStatus::Optimal);
  // with lambda = 0 and the engine idle any discharge covering the demand is optimal
  EXPECT_GE(s.p_em[0], drive_power(42000.0, eta) - 1.0);
  EXPECT_LE(s.p_em[0], kLimits.p_em_max + 1.0);
  EXPECT_NEAR(s.traj.p_gt[0], 0.0, 1.0);
  EXPECT_NEAR(s.objective, 4 * 0.03 * 10.0, 1e-6);
}

TEST(Solve, OracleOnRandomSmallInstances) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 50; ++k) {
    const auto p = random_ocp_problem(rng, 1 + k % 3);
    const auto s = solve(p);
    ASSERT_EQ(s.status, OcpStatus::Optimal) << "instance " << k;
    const int points = p.N == 3 ? 41 : 201;
    const double ref = oracle::grid_search(to_oracle(p), points);
    ASSERT_TRUE(std::isfinite(ref)) << "instance " << k;
    EXPECT_LE(s.objective, ref + 1e-6) << "instance " << k;
    EXPECT_GE(s.objective, ref - motor_grid_slack(p, points) - 1e-6) << "instance " << k;
    const auto lib = brute_force_reference(p, points);
    EXPECT_LE(s.objective, lib.objective + 1e-6) << "instance " << k;
    EXPECT_GE(s.objective, lib.objective - lib.grid_slack - 1e-6) << "instance " << k;
  }
}

TEST(Solve, OracleBudget) {
  std::mt19937_64 rng(1);
  const auto p = random_ocp_problem(rng, 5);
  try {
    brute_force_reference(p, 101);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleTooLarge);
  }
}

TEST(Solve, SingleFeasibleGridPoint) {
  // zero-width motor band: the oracle reduces to the one forced split
  const FuelMapCoeffs fuel{0.0, units::kg_per_MJ(0.08), 0.03};
  const StageEta eta{1e-9, 0.0, 1e6};
  PowerLimits lim = kLimits;
  lim.p_em_max = 1e-3;
  StageCoefficients st(1, make(eta, {0.0, 1.0, 0.0}, fuel, lim));
  const auto p = assemble(1, 10.0, st, 42000.0, kBattery.E_max, kBattery, lim, 0.0, 4, 34000.0);
  const double pgt = drive_power(42000.0, eta) - 1e-3;
  EXPECT_NEAR(oracle::grid_search(to_oracle(p), 2), 4 * eval_fuel_rate(pgt, fuel) * 10.0, 1e-9);
}

TEST(Solve, RelaxationTightOnRandomInstances) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 30; ++k) {
    auto p = random_ocp_problem(rng, 2 + k % 6);
    p.lambda = 0.0;
    const auto s = solve(p);
    ASSERT_EQ(s.status, OcpStatus::Optimal);
    expect_equality_recovery(p, s);
  }
}

TEST(Solve, DefaultMissionFirstProblem) {
  const auto p = default_k0();
  const auto s = solve(p);
  ASSERT_EQ(s.status, OcpStatus::Optimal);
  expect_equality_recovery(p, s);
  for (std::size_t i = 0; i < p.N; ++i) {
    EXPECT_LE(s.traj.m[i + 1], s.traj.m[i]);
    EXPECT_GE(s.traj.E[i + 1], p.battery.E_min - 1e-6 * (p.battery.E_max - p.battery.E_min));
    EXPECT_LE(s.traj.E[i + 1], p.battery.E_max + 1e-6 * (p.battery.E_max - p.battery.E_min));
  }
  EXPECT_LE(max_violation(p, s.traj, s.p_em_model), 1e-7);
}

TEST(Solve, StrictMassDecreaseWithIdleBurn) {
  std::mt19937_64 rng(9);
  const auto p = random_ocp_problem(rng, 4);
  const auto s = solve(p);
  ASSERT_EQ(s.status, OcpStatus::Optimal);
  for (std::size_t i = 0; i < p.N; ++i) {
    if (p.stages[i].fuel.beta0 > 0.0 || s.traj.p_gt[i] > 1.0) {
      EXPECT_LT(s.traj.m[i + 1], s.traj.m[i]);
    }
  }
}

TEST(Solve, ConvexCombinationsOfFeasiblePointsAreFeasible) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    auto p = random_ocp_problem(rng, 3 + k % 3);
    p.lambda = 0.0;
    const auto a = solve(p);
    p.lambda = units::kg_per_MJ(0.3);
    const auto b = solve(p);
    ASSERT_EQ(a.status, OcpStatus::Optimal);
    ASSERT_EQ(b.status, OcpStatus::Optimal);
    for (int j = 0; j < 5; ++j) {
      const double t = U(rng);
      auto mix = [t](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) z[i] = t * x[i] + (1.0 - t) * y[i];
        return z;
      };
      Trajectory c{mix(a.traj.p_gt, b.traj.p_gt), mix(a.traj.p_b, b.traj.p_b), mix(a.traj.m, b.traj.m),
                   mix(a.traj.E, b.traj.E)};
      EXPECT_LE(max_violation(p, c, mix(a.p_em_model, b.p_em_model)), 1e-7);
    }
  }
}

TEST(Solve, ConsistentUnitRescalingKeepsTheArgmin) {
  std::mt19937_64 rng(12);
  const double k = 1e-3;  // W -> kW, J -> kJ
  for (int n = 0; n < 5; ++n) {
    auto p = random_ocp_problem(rng, 4);
    auto q = p;
    q.E0 *= k;
    q.battery.E_min *= k;
    q.battery.E_max *= k;
    q.battery.R /= k;  // keeps R P_b^2 / U^2 in the scaled power unit
    q.limits = {p.limits.p_gt_min * k, p.limits.p_gt_max * k, p.limits.p_em_min * k, p.limits.p_em_max * k};
    q.lambda /= k;
    for (auto& s : q.stages) {
      s.eta = s.eta.scaled(k);
      s.loss.kappa2 /= k;
      s.loss.kappa0 *= k;
      s.fuel.beta2 /= k * k;
      s.fuel.beta1 /= k;
      for (double* v : {&s.p_drv_estimate, &s.p_em_min, &s.p_em_max, &s.p_b_min, &s.p_b_max}) *v *= k;
    }
    const auto a = solve(p), b = solve(q);
    ASSERT_EQ(a.status, OcpStatus::Optimal);
    ASSERT_EQ(b.status, OcpStatus::Optimal);
    EXPECT_NEAR(a.objective, b.objective, 1e-7);
    for (std::size_t i = 0; i < p.N; ++i) {
      EXPECT_NEAR(b.traj.p_gt[i] / k, a.traj.p_gt[i], 1e-4 * p.limits.p_gt_max);
      EXPECT_NEAR(b.traj.p_b[i] / k, a.traj.p_b[i], 1e-4 * p.limits.p_gt_max);
    }
  }
}

TEST(Solve, WarmAndColdStartsAgree) {
  const auto p = default_k0();
  const auto first = solve(p);
  ASSERT_EQ(first.status, OcpStatus::Optimal);
  auto next = p;
  next.N -= 1;
  next.stages.erase(next.stages.begin());
  next.m0 = first.traj.m[1];
  next.E0 = first.traj.E[1];
  const auto cold = solve(next);
  const auto warm = solve(next, {}, shift_solution(first));
  ASSERT_EQ(cold.status, OcpStatus::Optimal);
  ASSERT_EQ(warm.status, OcpStatus::Optimal);
  EXPECT_NEAR(cold.objective, warm.objective, 1e-6);
  EXPECT_LT(warm.iterations, cold.iterations);
  // principle of optimality along the predicted trajectory
  EXPECT_NEAR(cold.objective, first.objective - (p.m0 - first.traj.m[1]), 1e-6);
}

TEST(Solve, TerminalWeightKeepsChargeInTheBattery) {
  const auto a = solve(default_k0(0.0));
  const auto b = solve(default_k0(units::kg_per_MJ(0.5)));
  ASSERT_EQ(a.status, OcpStatus::Optimal);
  ASSERT_EQ(b.status, OcpStatus::Optimal);
  EXPECT_GT(b.traj.E.back(), a.traj.E.back());
}
