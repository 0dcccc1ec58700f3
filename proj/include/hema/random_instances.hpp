#pragma once

#include <random>

#include "hema/ocp.hpp"
#include "hema/units.hpp"

namespace hema {

/**
 * @brief Small random convex problems for cross-checking against brute_force_reference.
 *
 * Demand stays below the gas-turbine ceiling and the initial SOC keeps clear of E_max, so the
 * oracle's grid-slack bound applies.
 */
inline OcpProblem random_ocp_problem(std::mt19937_64& rng, std::size_t N) {
  auto U = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  OcpProblem p;
  p.N = N;
  p.delta = 10.0;
  p.n_arrangements = 4;
  p.m0 = U(30000.0, 45000.0);
  p.m_dry = p.m0 - 5000.0;
  p.battery = {750.0, 0.01, units::MJ(221.0), units::MJ(939.0)};
  p.limits = {0.0, units::MW(5.0), U(0.0, 1.0) < 0.3 ? -units::MW(U(0.2, 2.0)) : 0.0, units::MW(U(0.5, 2.0))};
  // initial SOC either near the bottom (E_min may bind) or comfortably inside the band
  p.E0 = U(0.0, 1.0) < 0.4 ? p.battery.E_min + units::MJ(U(1.0, 25.0)) : units::MJ(U(300.0, 850.0));
  p.lambda = U(0.0, 1.0) < 0.5 ? 0.0 : units::kg_per_MJ(U(0.0, 0.15));
  for (std::size_t i = 0; i < N; ++i) {
    StageData s;
    s.eta.eta2 = U(1e-5, 2e-4);
    s.eta.eta1 = U(10.0, 60.0);
    const double demand = U(-1.0, 3.5) * 1e6;
    s.eta.eta0 = demand - (s.eta.eta2 * p.m0 + s.eta.eta1) * p.m0;
    s.loss = {U(0.0, 1.0) < 0.2 ? 0.0 : U(1e-9, 2e-7), U(1.0, 1.2), 0.0};
    s.fuel = {U(0.0, 1.0) < 0.5 ? 0.0 : U(0.0, 5e-15), units::kg_per_MJ(U(0.05, 0.3)), U(0.0, 0.05)};
    s.omega = 200.0;
    s.p_drv_estimate = demand;
    s.p_em_min = std::max(p.limits.p_em_min, effective_em_lower_bound(s.loss, p.limits));
    s.p_em_max = p.limits.p_em_max;
    s.p_b_min = battery_power(s.p_em_min, s.loss, p.battery);
    s.p_b_max = battery_power(s.p_em_max, s.loss, p.battery);
    p.stages.push_back(s);
  }
  return p;
}

}  // namespace hema
