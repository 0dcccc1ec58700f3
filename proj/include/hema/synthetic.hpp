#pragma once

#include <cmath>
#include <vector>

#include "hema/flight_dynamics.hpp"
#include "hema/scheduling.hpp"
#include "hema/units.hpp"

// Synthetic stand-ins for data that is not publicly tabulated: the mission profile, the fan
// map and the motor loss-map coefficients. They are shaped to be physically plausible, not
// to reproduce any particular engine.
namespace hema::synthetic {

/// Key points of the default climb-cruise-descent trapezoid.
struct MissionShape {
  double duration = 3600.0;   ///< s
  double climb_time = 600.0;  ///< s
  double descent_time = 400.0;
  double cruise_altitude = 9000.0;  ///< m
  double low_speed = 150.0;   ///< TAS at both ends, m/s
  double cruise_speed = 190.0;
};

/// Piecewise-linear altitude and TAS, sampled every delta seconds; gamma derived from the path.
inline FlightPlan default_flight_plan(double delta = 10.0, const MissionShape& shape = {}) {
  const double t1 = shape.climb_time;
  const double t2 = shape.duration - shape.descent_time;
  const double T = shape.duration;
  auto ramp = [&](double t, double lo, double hi) {
    if (t <= t1) return lo + (hi - lo) * t / t1;
    if (t <= t2) return hi;
    return hi + (lo - hi) * (t - t2) / (T - t2);
  };
  FlightPlan plan;
  plan.delta = delta;
  const auto n = static_cast<std::size_t>(std::llround(T / delta));
  plan.steps.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * delta;
    plan.steps[k].h = ramp(t, 0.0, shape.cruise_altitude);
    plan.steps[k].v = ramp(t, shape.low_speed, shape.cruise_speed);
  }
  derive_flight_path_angles(plan);
  return plan;
}

/// Omega = 70 + 6 P[MW] + 0.5 h[km]: increasing in drive power, mildly increasing with altitude.
inline FanMap fan_map() {
  FanMap map;
  map.mach = 0.55;
  map.cp = 1000.0;
  for (int k = 0; k <= 12; ++k) map.altitudes.push_back(1000.0 * k);
  for (int k = -12; k <= 16; ++k) map.powers.push_back(units::MW(0.5 * k));
  for (double h : map.altitudes)
    for (double p : map.powers) map.omega.push_back(70.0 + 6.0 * units::to_MW(p) + 0.5 * h / 1000.0);
  return map;
}

/// Shape of the synthetic motor loss map.
struct LossShape {
  double kappa2_ref = 1e-7;  ///< 1/W at omega_ref
  double omega_ref = 225.0;    ///< rad/s
  double kappa1_min = 1.03;
  double bowl = 1.0;           ///< kappa1 rise per (100 rad/s)^2 away from omega_best
  double omega_best = 200.0;   ///< rad/s
};

/**
 * Motor losses: a copper-loss term kappa2 falling with speed squared (same power at lower
 * speed needs more torque) and a marginal draw kappa1 with a best-efficiency speed.
 * kappa0 = 0 so an idle motor draws nothing. The fuel map is speed independent.
 */
inline CoeffTable coeff_table(double beta1_kg_per_MJ = 0.08, double beta0_kg_s = 0.03, const LossShape& shape = {}) {
  CoeffTable t;
  for (int w = 60; w <= 420; w += 20) {
    CoeffRow r;
    r.omega = w;
    const double x = (w - shape.omega_best) / 100.0;
    const double q = shape.omega_ref / w;
    r.loss = {shape.kappa2_ref * q * q, shape.kappa1_min + shape.bowl * x * x, 0.0};
    r.fuel = {0.0, units::kg_per_MJ(beta1_kg_per_MJ), beta0_kg_s};
    t.rows.push_back(r);
  }
  return t;
}

}  // namespace hema::synthetic
